#include "doctest.h"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/linalg.hpp"
#include "gms/rng.hpp"
#include "gms/spectral_basis.hpp"
#include "gms/synthetic.hpp"

#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

using gms::linalg::Matrix;
using gms::SpectralBasis;

namespace {

gms::SuiteMatrix random_suite(std::size_t n_steps, std::size_t m, std::uint64_t seed) {
    gms::rng::Stream s(seed, gms::rng::Space::Synthetic, 1000);
    gms::SuiteMatrix suite;
    suite.dt = 0.02;
    suite.n_steps = n_steps;
    suite.data = Matrix(n_steps, m);
    for (std::size_t j = 0; j < m; ++j) {
        suite.record_ids.push_back("r" + std::to_string(j));
        for (std::size_t i = 0; i < n_steps; ++i) {
            suite.data(i, j) = s.uniform(-0.5, 0.5);
        }
    }
    suite.source_meta.resize(m);
    return suite;
}

double reconstruction_error(const gms::SuiteMatrix& suite, const SpectralBasis& basis) {
    const Matrix recon = gms::linalg::matmul(basis.u, basis.sigma);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < suite.m(); ++j) {
        for (std::size_t i = 0; i < suite.n_steps; ++i) {
            const double d = suite.data(i, j) - recon(i, j);
            num += d * d;
            den += suite.data(i, j) * suite.data(i, j);
        }
    }
    return std::sqrt(num / den);
}

double max_orthonormality_defect(const Matrix& u) {
    double worst = 0.0;
    for (std::size_t a = 0; a < u.cols(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < u.rows(); ++i) {
                d += u(i, a) * u(i, b);
            }
            worst = std::max(worst, std::abs(d - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("full-rank reconstruction and orthonormality on a random suite") {
    const gms::SuiteMatrix suite = random_suite(300, 12, 5);
    const SpectralBasis basis = gms::svd_thin(suite);

    CHECK(basis.p == 12);
    CHECK(basis.n_steps == 300);
    CHECK(basis.dt == 0.02);
    CHECK(reconstruction_error(suite, basis) <= 1e-9);
    CHECK(max_orthonormality_defect(basis.u) <= 1e-12);
    CHECK(!basis.basis_id.empty());
}

TEST_CASE("singular values and subspace match the reference svd") {
    const gms::SuiteMatrix suite = random_suite(120, 8, 6);
    const SpectralBasis basis = gms::svd_thin(suite);
    const oracle::Svd ref = oracle::svd(suite.data);

    REQUIRE(basis.singular_values.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i > 0) {
            CHECK(basis.singular_values[i] <= basis.singular_values[i - 1]);
        }
        CHECK(basis.singular_values[i] ==
              doctest::Approx(ref.singular_values[i]).epsilon(1e-10));
    }

    // Each basis direction matches the reference up to sign.
    for (std::size_t j = 0; j < 8; ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < 120; ++i) {
            d += basis.u(i, j) * ref.u(i, j);
        }
        CHECK(std::abs(d) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("sign convention puts the largest-magnitude entry positive") {
    const gms::SuiteMatrix suite = random_suite(60, 5, 7);
    const SpectralBasis basis = gms::svd_thin(suite);
    for (std::size_t j = 0; j < basis.p; ++j) {
        double peak = 0.0;
        for (std::size_t i = 0; i < basis.n_steps; ++i) {
            if (std::abs(basis.u(i, j)) > std::abs(peak)) {
                peak = basis.u(i, j);
            }
        }
        CHECK(peak > 0.0);
    }
}

TEST_CASE("rank-p truncation satisfies the Eckart-Young identity") {
    const gms::SuiteMatrix suite = random_suite(150, 10, 8);
    const SpectralBasis full = gms::svd_thin(suite);

    double total_sq = 0.0;
    for (double s : full.singular_values) {
        total_sq += s * s;
    }
    for (std::size_t p = 1; p <= 10; ++p) {
        const SpectralBasis trunc = gms::truncate_rank(full, p);
        CHECK(trunc.p == p);
        CHECK(trunc.singular_values.size() == 10); // bookkeeping keeps all values

        const Matrix recon = gms::linalg::matmul(trunc.u, trunc.sigma);
        double err_sq = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
            for (std::size_t i = 0; i < 150; ++i) {
                const double d = suite.data(i, j) - recon(i, j);
                err_sq += d * d;
            }
        }
        double tail_sq = 0.0;
        for (std::size_t i = p; i < 10; ++i) {
            tail_sq += full.singular_values[i] * full.singular_values[i];
        }
        // ||A - A_p||_F^2 equals the discarded singular-value energy.
        CHECK(err_sq == doctest::Approx(tail_sq).epsilon(1e-8).scale(total_sq));
    }

    CHECK(gms::truncate_rank(full, 99).p == 10); // clamped to the rank
}

TEST_CASE("explained variance is a normalized non-increasing distribution") {
    const gms::SuiteMatrix suite = random_suite(80, 7, 9);
    const SpectralBasis basis = gms::svd_thin(suite);
    const gms::ExplainedVariance ev = gms::explained_variance(basis);

    REQUIRE(ev.per_vector.size() == 7);
    REQUIRE(ev.cumulative.size() == 7);
    double sum = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(ev.per_vector[i] >= 0.0);
        if (i > 0) {
            CHECK(ev.per_vector[i] <= ev.per_vector[i - 1] + 1e-15);
            CHECK(ev.cumulative[i] >= ev.cumulative[i - 1]);
        }
        sum += ev.per_vector[i];
        CHECK(ev.cumulative[i] == doctest::Approx(sum).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev.cumulative.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("variance truncation picks the smallest sufficient rank") {
    const gms::SuiteMatrix suite = random_suite(90, 9, 10);
    const SpectralBasis full = gms::svd_thin(suite);
    const gms::ExplainedVariance ev = gms::explained_variance(full);

    for (double tau : {0.5, 0.9, 0.99}) {
        const SpectralBasis trunc = gms::truncate_variance(full, tau);
        CHECK(ev.cumulative[trunc.p - 1] >= tau);
        if (trunc.p > 1) {
            CHECK(ev.cumulative[trunc.p - 2] < tau);
        }
    }
    CHECK(gms::truncate_variance(full, 1.0).p == full.p);
}

TEST_CASE("projection of a suite member reconstructs the original record") {
    const gms::SuiteMatrix suite = gms::synthetic_suite(6, 3, 0.02, 30.0);
    const SpectralBasis basis = gms::svd_thin(suite);

    const gms::GroundMotionRecord member = suite.column(2);
    const gms::WeightVector w = gms::project(basis, member);
    CHECK(w.basis_id == basis.basis_id);
    REQUIRE(w.w.size() == basis.p);

    // The projection weights equal the stored sigma column.
    for (std::size_t i = 0; i < basis.p; ++i) {
        CHECK(w.w[i] == doctest::Approx(basis.sigma(i, 2)).epsilon(1e-9).scale(1.0));
    }

    const gms::GroundMotionRecord back = gms::reconstruct(basis, w);
    CHECK(back.dt == member.dt);
    REQUIRE(back.n_samples() == member.n_samples());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < member.n_samples(); ++i) {
        const double d = back.accel[i] - member.accel[i];
        num += d * d;
        den += member.accel[i] * member.accel[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-9);
}

TEST_CASE("grid and identity mismatches fail loudly") {
    const gms::SuiteMatrix suite = random_suite(50, 4, 12);
    const SpectralBasis basis = gms::svd_thin(suite);

    gms::GroundMotionRecord wrong_dt = suite.column(0);
    wrong_dt.dt = 0.01;
    CHECK_THROWS_AS(gms::project(basis, wrong_dt), gms::GridMismatch);

    gms::GroundMotionRecord wrong_len = suite.column(0);
    wrong_len.accel.pop_back();
    CHECK_THROWS_AS(gms::project(basis, wrong_len), gms::GridMismatch);

    gms::WeightVector alien;
    alien.w.assign(basis.p, 0.0);
    alien.basis_id = "not-this-basis";
    CHECK_THROWS_AS(gms::reconstruct(basis, alien), gms::BasisMismatch);

    gms::WeightVector short_w = gms::project(basis, suite.column(1));
    short_w.w.pop_back();
    CHECK_THROWS_AS(gms::reconstruct(basis, short_w), gms::BasisMismatch);
}

TEST_CASE("rank-deficient suites cap the rank and still reconstruct") {
    // A silent channel: the all-zero column contributes an exactly zero
    // singular value, which the rank cap must drop.
    gms::SuiteMatrix padded = random_suite(70, 4, 13);
    for (std::size_t i = 0; i < 70; ++i) {
        padded.data(i, 3) = 0.0;
    }
    const SpectralBasis capped = gms::svd_thin(padded);
    CHECK(capped.p == 3);
    CHECK(reconstruction_error(padded, capped) <= 1e-9);

    // Duplicated records: the data is rank 3 however many copies exist, and
    // whatever numerical rank survives the cap must still reconstruct and
    // stay orthonormal.
    gms::SuiteMatrix dup;
    dup.dt = padded.dt;
    dup.n_steps = padded.n_steps;
    dup.data = Matrix(70, 6);
    for (std::size_t j = 0; j < 6; ++j) {
        dup.record_ids.push_back("d" + std::to_string(j));
        for (std::size_t i = 0; i < 70; ++i) {
            dup.data(i, j) = padded.data(i, j % 3);
        }
    }
    dup.source_meta.resize(6);
    const SpectralBasis basis = gms::svd_thin(dup);
    CHECK(basis.p >= 3);
    CHECK(reconstruction_error(dup, basis) <= 1e-9);
    CHECK(max_orthonormality_defect(basis.u) <= 1e-11);

    gms::SuiteMatrix zero;
    zero.dt = 0.02;
    zero.n_steps = 10;
    zero.record_ids = {"z"};
    zero.source_meta.resize(1);
    zero.data = Matrix(10, 1);
    CHECK_THROWS_AS(gms::svd_thin(zero), gms::AllZeroSuite);
}

TEST_CASE("basis save/load round trip preserves identity and payload") {
    helpers::TempDir dir("basis");
    const gms::SuiteMatrix suite = random_suite(60, 5, 14);
    const SpectralBasis basis = gms::svd_thin(suite);

    const auto path = dir / "basis.qbasis";
    gms::save_basis(basis, path, {{"note", "test"}});
    CHECK(std::filesystem::exists(dir / "basis.qbasis.json"));
    const nlohmann::json sidecar = gms::io::read_json_file(dir / "basis.qbasis.json");
    CHECK(sidecar.at("basis_id") == basis.basis_id);
    CHECK(sidecar.at("provenance").at("note") == "test");

    const SpectralBasis back = gms::load_basis(path);
    CHECK(back.basis_id == basis.basis_id);
    CHECK(back.p == basis.p);
    CHECK(back.n_steps == basis.n_steps);
    CHECK(back.dt == basis.dt);
    CHECK(back.u.data() == basis.u.data());
    CHECK(back.sigma.data() == basis.sigma.data());
    CHECK(back.singular_values == basis.singular_values);

    // The identity is the hash of the serialized payload.
    const std::vector<std::uint8_t> payload = gms::serialize_basis(basis);
    CHECK(basis.basis_id == gms::io::sha256_hex(payload));
}

TEST_CASE("weight bounds are tight and sampling stays inside them") {
    const gms::SuiteMatrix suite = random_suite(80, 6, 15);
    const SpectralBasis basis = gms::svd_thin(suite);
    const gms::WeightBounds bounds = gms::weight_bounds(basis);

    REQUIRE(bounds.lo.size() == basis.p);
    REQUIRE(bounds.hi.size() == basis.p);
    CHECK(bounds.basis_id == basis.basis_id);
    for (std::size_t i = 0; i < basis.p; ++i) {
        double lo = basis.sigma(i, 0);
        double hi = basis.sigma(i, 0);
        for (std::size_t j = 1; j < basis.m(); ++j) {
            lo = std::min(lo, basis.sigma(i, j));
            hi = std::max(hi, basis.sigma(i, j));
        }
        CHECK(bounds.lo[i] == lo);
        CHECK(bounds.hi[i] == hi);
    }

    gms::rng::Stream stream(3, gms::rng::Space::WeightSample, 0);
    const gms::WeightVector w = gms::sample_weights(bounds, stream);
    REQUIRE(w.w.size() == basis.p);
    CHECK(w.basis_id == basis.basis_id);
    for (std::size_t i = 0; i < basis.p; ++i) {
        CHECK(w.w[i] >= bounds.lo[i]);
        CHECK(w.w[i] <= bounds.hi[i]);
    }

    gms::rng::Stream stream2(3, gms::rng::Space::WeightSample, 0);
    const gms::WeightVector w2 = gms::sample_weights(bounds, stream2);
    CHECK(w.w == w2.w);
}

TEST_CASE("thin svd handles a tall realistic suite") {
    // Reduced-size stand-in for the full-length case the acceptance suite
    // times; here only the accuracy invariants are checked.
    const gms::SuiteMatrix suite = gms::synthetic_suite(12, 21, 0.02, 50.0);
    const SpectralBasis basis = gms::svd_thin(suite);
    CHECK(reconstruction_error(suite, basis) <= 1e-9);
    CHECK(max_orthonormality_defect(basis.u) <= 1e-11);
}
