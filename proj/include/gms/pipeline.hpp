#pragma once

#include "gms/dataset.hpp"
#include "gms/ground_motion.hpp"
#include "gms/metrics.hpp"
#include "gms/regression/model.hpp"
#include "gms/rng.hpp"
#include "gms/shear_model.hpp"
#include "gms/spectral_basis.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms::pipeline {

struct ParamSupport {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-story parameter supports. Every story draws an independent
/// (stiffness, yield force, damping ratio) triple from the same supports;
/// the hardening ratio is shared and deterministic. Degenerate supports
/// (lo == hi) are allowed so fixed-parameter studies stay expressible.
struct MaterialTemplate {
    std::size_t n_dof = 1;
    ParamSupport stiffness{32.0, 48.0};     // E
    ParamSupport yield_force{0.21, 0.35};   // Fy
    ParamSupport damping_ratio{0.04, 0.06}; // xi
    double hardening_ratio = 0.02;

    void validate() const;
    /// Story-major draw order: (E, Fy, xi) for story 1, then story 2, ...
    std::vector<StorySpec> draw(rng::Stream& stream) const;
    /// Feature columns contributed by the material parameters: E1, Fy1,
    /// xi1, E2, ... matching the draw order.
    std::vector<std::string> feature_names() const;

    /// `{"n_dof":1, "E":[32,48], "Fy":[0.21,0.35], "xi":[0.04,0.06],
    ///   "b":0.02}`; unknown keys rejected.
    static MaterialTemplate from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct GenerationConfig {
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    MaterialTemplate material;

    static GenerationConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Monte Carlo dataset: per sample, basis weights are drawn uniformly inside
/// the suite's weight bounds, material parameters inside the template
/// supports, the motion is reconstructed and solved, and the two EDPs become
/// the targets. Failed solves are dropped and counted in metadata; more than
/// 1% failures aborts. Rows depend only on (seed, sample index), never on
/// the worker count.
Dataset generate_dataset(const SpectralBasis& basis, const GenerationConfig& config);

struct LeaderboardOptions {
    std::size_t cv_folds = 5;
    std::uint64_t seed = 0;
    int workers = 0;
    /// When set, models and reports are persisted here.
    std::filesystem::path output_dir;
};

struct LeaderboardEntry {
    regression::Kind kind = regression::Kind::DecisionTree;
    nlohmann::json hyperparameters; // canonical winner of the grid
    R2 train_r2;                    // variance-ratio form
    R2 test_r2;
    R2 train_r2_sse; // conventional 1 - SSE/SST, diagnostic only
    R2 test_r2_sse;
    nlohmann::json cv;          // full CV table, or a single-candidate note
    nlohmann::json diagnostics; // trainer convergence facts
    std::string model_file;     // file name under output_dir when persisted
    std::shared_ptr<const regression::Regressor> model;
};

struct LeaderboardResult {
    std::vector<LeaderboardEntry> entries; // ranked by test mean R^2, best first
    nlohmann::json report;
};

/// Grid search (k-fold CV on the train split when a kind has more than one
/// candidate), final fit per kind on the full train split, evaluation on
/// both splits, ranking by test mean R^2. `grids` maps kind name to either
/// one hyperparameter object or an array of candidates; kinds may be
/// omitted to skip them. The network's early stopping monitors the test
/// split, mirroring how the reference results were produced.
LeaderboardResult train_leaderboard(const Dataset& ds, const nlohmann::json& grids,
                                    const LeaderboardOptions& opts);

struct ValidationOptions {
    std::size_t n_samples = 50;
    std::uint64_t seed = 0;
    int workers = 0;
    std::size_t repeats = 1;
    /// |y| below this is excluded from percent errors (noted in the report).
    double floor = 1e-9;
    /// Ablation hook for the record protocol: simulate ground truth with the
    /// reconstructed motion instead of the record, so the remaining error is
    /// the surrogate's alone.
    bool truth_from_reconstruction = false;
};

struct EdpErrorStats {
    std::string name;
    std::vector<double> percent_errors; // repeat 0, draw order, exclusions removed
    double median = 0.0;
    double p95 = 0.0;
    Histogram histogram; // 20 equal-width bins on [0, max error]
    std::size_t excluded = 0;
};

struct ValidationReport {
    std::vector<EdpErrorStats> per_edp;
    /// One object per (repeat, sample): truth, prediction, percent error and
    /// exclusion flag per EDP. errors.csv is written from exactly these rows.
    nlohmann::json samples;
    /// Protocol-specific extras: intensity-measure comparison tables or
    /// reconstruction diagnostics.
    nlohmann::json extras;
    nlohmann::json provenance;
    /// Median percent error per repeat per EDP (length = repeats).
    nlohmann::json repeat_medians;
};

/// Draws n fresh (weights, materials) pairs from a namespace disjoint from
/// generation, simulates the truth, predicts, and aggregates percent errors.
/// `suite` is optional; when present the report carries an intensity-measure
/// comparison of the sampled motions against the suite records.
ValidationReport validate_generated(const regression::Regressor& model,
                                    const SpectralBasis& basis, const MaterialTemplate& tmpl,
                                    const SuiteMatrix* suite, const ValidationOptions& opts);

struct RecordValidation {
    ValidationReport report;
    double reconstruction_rel_l2 = 0.0;
    /// Percent differences reconstructed vs record on the basis grid.
    double pga_delta_pct = 0.0;
    double arias_delta_pct = 0.0;
    double lambda1_delta_pct = 0.0;
};

/// Fixes the weights by projecting the record (resampled/padded onto the
/// basis grid first), then varies only the material parameters. Ground truth
/// uses the record itself; predictions use [projected weights, materials].
RecordValidation validate_record(const regression::Regressor& model, const SpectralBasis& basis,
                                 const GroundMotionRecord& record, const MaterialTemplate& tmpl,
                                 const ValidationOptions& opts);

nlohmann::json validation_report_json(const ValidationReport& report);
void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path);
void write_leaderboard_csv(const LeaderboardResult& result, const std::filesystem::path& path);

} // namespace gms::pipeline
