#include "doctest.h"

#include "gms/ground_motion.hpp"
#include "gms/intensity.hpp"
#include "gms/rng.hpp"
#include "gms/synthetic.hpp"

#include "support/test_helpers.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace {

/// Direct O(n^2) DFT used as the FFT reference.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

} // namespace

TEST_CASE("radix-2 fft matches a direct dft") {
    gms::rng::Stream s(21, gms::rng::Space::Synthetic, 77);
    std::vector<std::complex<double>> x(64);
    for (auto& v : x) {
        v = {s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0)};
    }
    const std::vector<std::complex<double>> want = dft(x);
    gms::detail::fft_radix2(x);
    for (std::size_t k = 0; k < 64; ++k) {
        CHECK(x[k].real() == doctest::Approx(want[k].real()).epsilon(1e-10).scale(1.0));
        CHECK(x[k].imag() == doctest::Approx(want[k].imag()).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("pga is the absolute sample peak in g") {
    const gms::GroundMotionRecord rec =
        helpers::make_record("p", 0.02, {0.1, -0.42, 0.3, 0.41});
    CHECK(gms::pga(rec) == 0.42);
}

TEST_CASE("arias intensity of a constant record matches the closed form") {
    // a(t) = 0.3 g for 10 s: IA = pi/(2 g0) * (0.3 g0)^2 * 10.
    const std::size_t n = 501;
    const double dt = 0.02;
    const gms::GroundMotionRecord rec =
        helpers::make_record("c", dt, std::vector<double>(n, 0.3));
    const double g0 = 9.80665;
    const double want = M_PI / (2.0 * g0) * (0.3 * g0) * (0.3 * g0) * (dt * (n - 1));
    CHECK(gms::arias_intensity(rec) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("spectral moments of a pure tone sit at the tone frequency") {
    // 4 Hz sine over exactly 1024 samples at dt = 1/128 s: the padded grid is
    // the natural grid and the tone occupies a single bin.
    const std::size_t n = 1024;
    const double dt = 1.0 / 128.0;
    const double f0 = 4.0;
    const double amp_g = 0.2;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = amp_g * std::sin(2.0 * M_PI * f0 * static_cast<double>(i) * dt);
    }
    const gms::GroundMotionRecord rec = helpers::make_record("tone", dt, a);

    const double amp_si = amp_g * 9.80665;
    const double lambda0 = gms::spectral_moment(rec, 0);
    const double lambda1 = gms::spectral_moment(rec, 1);
    const double lambda2 = gms::spectral_moment(rec, 2);

    // Zeroth moment is the mean-square of the signal: A^2/2 for a sine.
    CHECK(lambda0 == doctest::Approx(amp_si * amp_si / 2.0).epsilon(1e-6));
    // Higher moments scale by powers of the tone's angular frequency.
    const double w0 = 2.0 * M_PI * f0;
    CHECK(lambda1 / lambda0 == doctest::Approx(w0).epsilon(1e-6));
    CHECK(lambda2 / lambda0 == doctest::Approx(w0 * w0).epsilon(1e-6));
}

TEST_CASE("zeroth moment obeys parseval on the padded grid") {
    const gms::GroundMotionRecord rec = gms::synthetic_record(5, 2, 0.02);
    const double lambda0 = gms::spectral_moment(rec, 0);

    // Mean-square of the detrended signal over the padded power-of-two grid.
    std::size_t n2 = 1;
    while (n2 < rec.n_samples()) {
        n2 <<= 1;
    }
    double mean = 0.0;
    for (double v : rec.accel) {
        mean += v;
    }
    mean /= static_cast<double>(rec.n_samples());
    double sumsq = 0.0;
    for (double v : rec.accel) {
        const double d = (v - mean) * 9.80665;
        sumsq += d * d;
    }
    // The padding zeros are not detrended, so they contribute mean^2 each;
    // against the detrended in-record samples the identity holds within the
    // Nyquist-bin ambiguity, well under 1%.
    CHECK(lambda0 == doctest::Approx(sumsq / static_cast<double>(n2)).epsilon(0.01));
}

TEST_CASE("moments are reported per record in the suite table") {
    const gms::SuiteMatrix suite = gms::synthetic_suite(3, 8, 0.02, 30.0);
    const std::vector<gms::IMReport> table = gms::im_table(suite);
    REQUIRE(table.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(table[j].record_id == suite.record_ids[j]);
        CHECK(table[j].pga > 0.0);
        CHECK(table[j].arias > 0.0);
        CHECK(table[j].lambda1 > 0.0);
        CHECK(table[j].pga == gms::pga(suite.column(j)));
    }

    const gms::IMReport one = gms::im_report(suite.column(1));
    CHECK(one.pga == table[1].pga);
    CHECK(one.arias == table[1].arias);
    CHECK(one.lambda1 == table[1].lambda1);
}
