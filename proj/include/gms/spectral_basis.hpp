#pragma once

#include "gms/ground_motion.hpp"
#include "gms/linalg.hpp"
#include "gms/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms {

/// Orthonormal basis extracted from a suite A (n_steps x m) via its singular
/// value decomposition A = U S V^T. The basis keeps U (possibly truncated to
/// p columns) together with Sigma = U^T A, the per-record weights, so that
/// A is recovered as U * Sigma. singular_values always holds all m values so
/// explained-variance bookkeeping survives truncation.
struct SpectralBasis {
    linalg::Matrix u;                    // n_steps x p, orthonormal columns
    std::vector<double> singular_values; // length m, descending
    linalg::Matrix sigma;                // p x m, weights of the suite records
    std::size_t p = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::string basis_id;                // sha256 of the serialized payload

    std::size_t m() const { return singular_values.size(); }
};

/// Projection weights of one record onto a basis. Tagged with the basis id
/// so a reconstruction against the wrong basis fails loudly.
struct WeightVector {
    std::vector<double> w;
    std::string basis_id;
};

/// Per-direction weight range observed across the suite.
struct WeightBounds {
    std::vector<double> lo;
    std::vector<double> hi;
    std::string basis_id;
};

struct ExplainedVariance {
    std::vector<double> per_vector; // s_i^2 / sum s_j^2
    std::vector<double> cumulative;
};

/// Thin SVD of the suite through the Gram matrix G = A^T A: Jacobi
/// eigendecomposition of G gives V and the singular values, U = A V S^{-1}.
/// Columns of U are re-orthonormalized and sign-fixed (largest-magnitude
/// entry positive); Sigma is then recomputed as U^T A so U * Sigma
/// reproduces A to machine precision even for poorly conditioned suites.
/// Rank is capped where s_i <= 1e-12 * s_1.
SpectralBasis svd_thin(const SuiteMatrix& suite);

/// Keep the first p directions (clamped to the available rank).
SpectralBasis truncate_rank(const SpectralBasis& basis, std::size_t p);

/// Smallest p whose cumulative explained variance reaches tau.
SpectralBasis truncate_variance(const SpectralBasis& basis, double tau);

ExplainedVariance explained_variance(const SpectralBasis& basis);

/// sigma = U^T a. The record must live on the basis grid.
WeightVector project(const SpectralBasis& basis, const GroundMotionRecord& record);

/// a = U w.
GroundMotionRecord reconstruct(const SpectralBasis& basis, const WeightVector& weights);

WeightBounds weight_bounds(const SpectralBasis& basis);

/// Independent uniform draw within the observed bounds, one weight per
/// direction.
WeightVector sample_weights(const WeightBounds& bounds, rng::Stream& stream);

/// Binary basis file ("QBASIS01") plus a JSON sidecar at <path>.json carrying
/// the basis id and provenance supplied by the caller.
void save_basis(const SpectralBasis& basis, const std::filesystem::path& path,
                const nlohmann::json& provenance = nlohmann::json::object());
SpectralBasis load_basis(const std::filesystem::path& path);

/// The exact bytes written by save_basis; basis_id is their SHA-256.
std::vector<std::uint8_t> serialize_basis(const SpectralBasis& basis);

} // namespace gms
