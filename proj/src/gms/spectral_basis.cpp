#include "gms/spectral_basis.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace gms {

namespace {

constexpr char kBasisMagic[8] = {'Q', 'B', 'A', 'S', 'I', 'S', '0', '1'};
constexpr double kRankTolerance = 1e-12; // relative to the largest singular value

/// Flip each column of U so its largest-magnitude entry is positive; ties go
/// to the earliest index. Removes the sign ambiguity of the decomposition so
/// bases are reproducible across platforms. Sigma rows flip along.
void fix_signs(linalg::Matrix& u, linalg::Matrix& sigma) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
        double* cj = u.col(j);
        std::size_t arg = 0;
        double best = std::abs(cj[0]);
        for (std::size_t i = 1; i < u.rows(); ++i) {
            if (std::abs(cj[i]) > best) {
                best = std::abs(cj[i]);
                arg = i;
            }
        }
        if (cj[arg] < 0.0) {
            for (std::size_t i = 0; i < u.rows(); ++i) {
                cj[i] = -cj[i];
            }
            for (std::size_t k = 0; k < sigma.cols(); ++k) {
                sigma(j, k) = -sigma(j, k);
            }
        }
    }
}

void assign_basis_id(SpectralBasis& basis) {
    basis.basis_id = io::sha256_hex(serialize_basis(basis));
}

} // namespace

SpectralBasis svd_thin(const SuiteMatrix& suite) {
    const std::size_t n = suite.n_steps;
    const std::size_t m = suite.m();
    if (m == 0 || n == 0) {
        throw Error("svd_thin: empty suite");
    }
    if (n < m) {
        throw Error("svd_thin: suite has more records than time steps (" + std::to_string(m) +
                    " > " + std::to_string(n) + ")");
    }
    for (double v : suite.data.data()) {
        if (!std::isfinite(v)) {
            throw NonFiniteSample("svd_thin: suite contains a non-finite sample");
        }
    }

    // Gram route: G = A^T A is only m x m, and its eigenvectors are the right
    // singular vectors of A.
    const linalg::Matrix& a = suite.data;
    linalg::Matrix g(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            double acc = 0.0;
            const double* ci = a.col(i);
            const double* cj = a.col(j);
            for (std::size_t r = 0; r < n; ++r) {
                acc += ci[r] * cj[r];
            }
            g(i, j) = g(j, i) = acc;
        }
    }

    const linalg::SymmetricEigen eig = linalg::jacobi_eigh(g);

    SpectralBasis basis;
    basis.n_steps = n;
    basis.dt = suite.dt;
    basis.singular_values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        basis.singular_values[i] = std::sqrt(std::max(eig.values[i], 0.0));
    }

    // Numerical rank: directions with s_i <= 1e-12 * s_1 carry no signal and
    // would blow up in the 1/s scaling below.
    const double s1 = basis.singular_values[0];
    std::size_t rank = 0;
    while (rank < m && basis.singular_values[rank] > kRankTolerance * s1) {
        ++rank;
    }
    if (rank == 0) {
        throw AllZeroSuite("svd_thin: all singular values are zero");
    }

    // U = A V S^{-1} on the retained directions.
    basis.u = linalg::Matrix(n, rank);
    for (std::size_t j = 0; j < rank; ++j) {
        double* uj = basis.u.col(j);
        const double inv_s = 1.0 / basis.singular_values[j];
        for (std::size_t k = 0; k < m; ++k) {
            const double w = eig.vectors(k, j) * inv_s;
            if (w == 0.0) {
                continue;
            }
            const double* ak = a.col(k);
            for (std::size_t i = 0; i < n; ++i) {
                uj[i] += ak[i] * w;
            }
        }
    }

    // The Gram route amplifies rounding by the squared condition number, so
    // re-orthonormalize U and recompute the weights against the clean U.
    // U (U^T A) equals U S V^T exactly in exact arithmetic; in floating point
    // it restores the reconstruction to machine precision.
    linalg::orthonormalize_columns(basis.u);
    basis.sigma = linalg::Matrix(rank, m);
    for (std::size_t k = 0; k < m; ++k) {
        const double* ak = a.col(k);
        for (std::size_t j = 0; j < rank; ++j) {
            const double* uj = basis.u.col(j);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += uj[i] * ak[i];
            }
            basis.sigma(j, k) = acc;
        }
    }
    fix_signs(basis.u, basis.sigma);
    basis.p = rank;
    assign_basis_id(basis);
    return basis;
}

SpectralBasis truncate_rank(const SpectralBasis& basis, std::size_t p) {
    if (p == 0) {
        throw Error("truncate_rank: p must be at least 1");
    }
    p = std::min(p, basis.p);
    SpectralBasis out;
    out.n_steps = basis.n_steps;
    out.dt = basis.dt;
    out.singular_values = basis.singular_values;
    out.p = p;
    out.u = linalg::Matrix(basis.n_steps, p);
    std::copy(basis.u.data().begin(), basis.u.data().begin() + static_cast<std::ptrdiff_t>(basis.n_steps * p),
              out.u.data().begin());
    out.sigma = linalg::Matrix(p, basis.m());
    for (std::size_t k = 0; k < basis.m(); ++k) {
        for (std::size_t j = 0; j < p; ++j) {
            out.sigma(j, k) = basis.sigma(j, k);
        }
    }
    assign_basis_id(out);
    return out;
}

SpectralBasis truncate_variance(const SpectralBasis& basis, double tau) {
    if (!(tau > 0.0) || tau > 1.0) {
        throw Error("truncate_variance: tau must lie in (0, 1]");
    }
    const ExplainedVariance ev = explained_variance(basis);
    std::size_t p = basis.m();
    for (std::size_t i = 0; i < ev.cumulative.size(); ++i) {
        if (ev.cumulative[i] >= tau) {
            p = i + 1;
            break;
        }
    }
    return truncate_rank(basis, p);
}

ExplainedVariance explained_variance(const SpectralBasis& basis) {
    ExplainedVariance ev;
    double total = 0.0;
    for (double s : basis.singular_values) {
        total += s * s;
    }
    if (total == 0.0) {
        throw AllZeroSuite("explained_variance: all singular values are zero");
    }
    ev.per_vector.resize(basis.m());
    ev.cumulative.resize(basis.m());
    double running = 0.0;
    for (std::size_t i = 0; i < basis.m(); ++i) {
        ev.per_vector[i] = basis.singular_values[i] * basis.singular_values[i] / total;
        running += ev.per_vector[i];
        ev.cumulative[i] = running;
    }
    return ev;
}

WeightVector project(const SpectralBasis& basis, const GroundMotionRecord& record) {
    record.validate();
    if (record.accel.size() != basis.n_steps) {
        throw GridMismatch("project: record has " + std::to_string(record.accel.size()) +
                           " samples, basis expects " + std::to_string(basis.n_steps));
    }
    const double dt_tol = 1e-12 * std::max(record.dt, basis.dt);
    if (std::abs(record.dt - basis.dt) > dt_tol) {
        throw GridMismatch("project: record dt does not match the basis grid");
    }
    WeightVector wv;
    wv.basis_id = basis.basis_id;
    wv.w = linalg::matvec_transpose(basis.u, record.accel);
    return wv;
}

GroundMotionRecord reconstruct(const SpectralBasis& basis, const WeightVector& weights) {
    if (weights.basis_id != basis.basis_id) {
        throw BasisMismatch("reconstruct: weights belong to basis " + weights.basis_id +
                            ", not " + basis.basis_id);
    }
    if (weights.w.size() != basis.p) {
        throw BasisMismatch("reconstruct: weight count " + std::to_string(weights.w.size()) +
                            " does not match basis rank " + std::to_string(basis.p));
    }
    GroundMotionRecord rec;
    rec.id = "reconstructed";
    rec.dt = basis.dt;
    rec.accel = linalg::matvec(basis.u, weights.w);
    return rec;
}

WeightBounds weight_bounds(const SpectralBasis& basis) {
    WeightBounds b;
    b.basis_id = basis.basis_id;
    b.lo.resize(basis.p);
    b.hi.resize(basis.p);
    for (std::size_t j = 0; j < basis.p; ++j) {
        double lo = basis.sigma(j, 0);
        double hi = basis.sigma(j, 0);
        for (std::size_t k = 1; k < basis.m(); ++k) {
            lo = std::min(lo, basis.sigma(j, k));
            hi = std::max(hi, basis.sigma(j, k));
        }
        b.lo[j] = lo;
        b.hi[j] = hi;
    }
    return b;
}

WeightVector sample_weights(const WeightBounds& bounds, rng::Stream& stream) {
    WeightVector wv;
    wv.basis_id = bounds.basis_id;
    wv.w.resize(bounds.lo.size());
    for (std::size_t j = 0; j < bounds.lo.size(); ++j) {
        wv.w[j] = stream.uniform(bounds.lo[j], bounds.hi[j]);
    }
    return wv;
}

std::vector<std::uint8_t> serialize_basis(const SpectralBasis& basis) {
    std::vector<std::uint8_t> buf;
    buf.reserve(sizeof(kBasisMagic) + 3 * sizeof(std::uint32_t) + sizeof(double) +
                (basis.u.data().size() + basis.singular_values.size() + basis.sigma.data().size()) *
                    sizeof(double));
    for (std::size_t i = 0; i < sizeof(kBasisMagic); ++i) {
        buf.push_back(static_cast<std::uint8_t>(kBasisMagic[i]));
    }
    io::append_u32(buf, static_cast<std::uint32_t>(basis.n_steps));
    io::append_u32(buf, static_cast<std::uint32_t>(basis.m()));
    io::append_u32(buf, static_cast<std::uint32_t>(basis.p));
    io::append_f64(buf, basis.dt);
    io::append_f64_array(buf, basis.u.data().data(), basis.u.data().size());
    io::append_f64_array(buf, basis.singular_values.data(), basis.singular_values.size());
    io::append_f64_array(buf, basis.sigma.data().data(), basis.sigma.data().size());
    return buf;
}

void save_basis(const SpectralBasis& basis, const std::filesystem::path& path,
                const nlohmann::json& provenance) {
    const std::vector<std::uint8_t> payload = serialize_basis(basis);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write basis file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    out.close();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }

    nlohmann::json sidecar;
    sidecar["format"] = "QBASIS01";
    sidecar["basis_id"] = basis.basis_id;
    sidecar["n_steps"] = basis.n_steps;
    sidecar["m"] = basis.m();
    sidecar["p"] = basis.p;
    sidecar["dt"] = basis.dt;
    sidecar["provenance"] = provenance;
    io::write_json_file(path.string() + ".json", sidecar);
}

SpectralBasis load_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open basis file: " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kBasisMagic)) {
        throw IoError("not a QBASIS01 file: " + path.string());
    }
    SpectralBasis basis;
    basis.n_steps = io::read_u32(in);
    const std::size_t m = io::read_u32(in);
    basis.p = io::read_u32(in);
    basis.dt = io::read_f64(in);
    basis.u = linalg::Matrix(basis.n_steps, basis.p);
    io::read_f64_array(in, basis.u.data().data(), basis.u.data().size());
    basis.singular_values.resize(m);
    io::read_f64_array(in, basis.singular_values.data(), m);
    basis.sigma = linalg::Matrix(basis.p, m);
    io::read_f64_array(in, basis.sigma.data().data(), basis.sigma.data().size());
    // The id is defined as the hash of the payload, so recompute rather than
    // trust the sidecar.
    basis.basis_id = io::sha256_hex(serialize_basis(basis));
    return basis;
}

} // namespace gms
