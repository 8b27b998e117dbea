#include "gms/pipeline.hpp"

#include "gms/error.hpp"
#include "gms/intensity.hpp"
#include "gms/io.hpp"
#include "gms/newmark.hpp"
#include "gms/parallel.hpp"
#include "gms/regression/cv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace gms::pipeline {

namespace {

constexpr std::array<const char*, 2> kEdpNames = {"peak_roof_disp", "peak_floor_accel"};

void check_support(const ParamSupport& s, const char* name) {
    if (!(s.lo <= s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi)) {
        throw ConfigError(std::string(name) + " support must satisfy lo <= hi");
    }
}

ParamSupport support_from_json(const nlohmann::json& v, const char* name) {
    if (!v.is_array() || v.size() != 2) {
        throw ConfigError(std::string(name) + " support must be a [lo, hi] pair");
    }
    ParamSupport s{v[0].get<double>(), v[1].get<double>()};
    check_support(s, name);
    return s;
}

} // namespace

void MaterialTemplate::validate() const {
    if (n_dof < 1) {
        throw ConfigError("material template needs at least one story");
    }
    check_support(stiffness, "E");
    check_support(yield_force, "Fy");
    check_support(damping_ratio, "xi");
    if (stiffness.lo <= 0.0 || yield_force.lo <= 0.0) {
        throw ConfigError("E and Fy supports must be positive");
    }
    if (hardening_ratio < 0.0 || hardening_ratio >= 1.0) {
        throw ConfigError("hardening ratio must satisfy 0 <= b < 1");
    }
}

std::vector<StorySpec> MaterialTemplate::draw(rng::Stream& stream) const {
    std::vector<StorySpec> stories(n_dof);
    for (StorySpec& s : stories) {
        s.stiffness = stream.uniform(stiffness.lo, stiffness.hi);
        s.yield_force = stream.uniform(yield_force.lo, yield_force.hi);
        s.damping_ratio = stream.uniform(damping_ratio.lo, damping_ratio.hi);
        s.hardening_ratio = hardening_ratio;
    }
    return stories;
}

std::vector<std::string> MaterialTemplate::feature_names() const {
    std::vector<std::string> names;
    names.reserve(3 * n_dof);
    for (std::size_t s = 1; s <= n_dof; ++s) {
        names.push_back("E" + std::to_string(s));
        names.push_back("Fy" + std::to_string(s));
        names.push_back("xi" + std::to_string(s));
    }
    return names;
}

MaterialTemplate MaterialTemplate::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("material template must be a JSON object");
    }
    const std::set<std::string> allowed = {"n_dof", "E", "Fy", "xi", "b"};
    for (const auto& [key, value] : j.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw ConfigError("material template: unknown key '" + key + "'");
        }
    }
    MaterialTemplate t;
    try {
        if (j.contains("n_dof")) {
            t.n_dof = j.at("n_dof").get<std::size_t>();
        }
        if (j.contains("E")) {
            t.stiffness = support_from_json(j.at("E"), "E");
        }
        if (j.contains("Fy")) {
            t.yield_force = support_from_json(j.at("Fy"), "Fy");
        }
        if (j.contains("xi")) {
            t.damping_ratio = support_from_json(j.at("xi"), "xi");
        }
        t.hardening_ratio = j.value("b", t.hardening_ratio);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("material template: ") + e.what());
    }
    t.validate();
    return t;
}

nlohmann::json MaterialTemplate::to_json() const {
    return {{"n_dof", n_dof},
            {"E", {stiffness.lo, stiffness.hi}},
            {"Fy", {yield_force.lo, yield_force.hi}},
            {"xi", {damping_ratio.lo, damping_ratio.hi}},
            {"b", hardening_ratio}};
}

GenerationConfig GenerationConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("generation config must be a JSON object");
    }
    const std::set<std::string> allowed = {"n_samples", "seed", "workers", "material"};
    for (const auto& [key, value] : j.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw ConfigError("generation config: unknown key '" + key + "'");
        }
    }
    GenerationConfig c;
    try {
        c.n_samples = j.at("n_samples").get<std::size_t>();
        c.seed = j.value("seed", std::uint64_t{0});
        c.workers = j.value("workers", 0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("generation config: ") + e.what());
    }
    if (j.contains("material")) {
        c.material = MaterialTemplate::from_json(j.at("material"));
    }
    if (c.n_samples < 1) {
        throw ConfigError("n_samples must be at least 1");
    }
    return c;
}

nlohmann::json GenerationConfig::to_json() const {
    // The worker count is an execution detail: leaving it out keeps dataset
    // metadata byte-identical however many threads produced the rows.
    return {{"n_samples", n_samples}, {"seed", seed}, {"material", material.to_json()}};
}

namespace {

std::vector<double> feature_row(const std::vector<double>& weights,
                                const std::vector<StorySpec>& stories) {
    std::vector<double> row;
    row.reserve(weights.size() + 3 * stories.size());
    row.insert(row.end(), weights.begin(), weights.end());
    for (const StorySpec& s : stories) {
        row.push_back(s.stiffness);
        row.push_back(s.yield_force);
        row.push_back(s.damping_ratio);
    }
    return row;
}

bool any_story_yielded(const ResponseHistory& history, const std::vector<StorySpec>& stories) {
    for (std::size_t s = 0; s < stories.size(); ++s) {
        const double uy = stories[s].yield_force / stories[s].stiffness;
        double peak = 0.0;
        for (std::size_t t = 0; t < history.n_steps(); ++t) {
            const double below = s > 0 ? history.u(t, s - 1) : 0.0;
            peak = std::max(peak, std::abs(history.u(t, s) - below));
        }
        if (peak > uy) {
            return true;
        }
    }
    return false;
}

} // namespace

Dataset generate_dataset(const SpectralBasis& basis, const GenerationConfig& config) {
    config.material.validate();
    if (config.n_samples < 1) {
        throw ConfigError("n_samples must be at least 1");
    }
    if (basis.p < 1) {
        throw BasisMismatch("basis has no directions to sample");
    }
    const WeightBounds bounds = weight_bounds(basis);
    const std::size_t n = config.n_samples;
    const std::size_t d = basis.p + 3 * config.material.n_dof;

    struct Slot {
        std::vector<double> x;
        std::array<double, 2> y{};
        bool failed = false;
        bool yielded = false;
    };
    std::vector<Slot> slots(n);

    parallel_for(n, config.workers, [&](std::size_t i) {
        Slot& slot = slots[i];
        rng::Stream weight_stream(config.seed, rng::Space::WeightSample, i);
        const WeightVector wv = sample_weights(bounds, weight_stream);
        rng::Stream material_stream(config.seed, rng::Space::Generation, i);
        const std::vector<StorySpec> stories = config.material.draw(material_stream);

        GroundMotionRecord motion = reconstruct(basis, wv);
        motion.id = "sample_" + std::to_string(i);

        ShearModel structure(stories);
        ResponseHistory history;
        try {
            history = newmark_solve(structure, motion);
        } catch (const NonConvergence&) {
            slot.failed = true;
            return;
        }
        const EDP edp = extract_edps(history);
        slot.x = feature_row(wv.w, stories);
        slot.y = {edp.peak_roof_disp, edp.peak_floor_accel};
        slot.yielded = any_story_yielded(history, stories);
    });

    std::vector<std::size_t> failed;
    std::size_t yielded = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i].failed) {
            failed.push_back(i);
        } else if (slots[i].yielded) {
            ++yielded;
        }
    }
    const double failure_rate = static_cast<double>(failed.size()) / static_cast<double>(n);
    if (failure_rate > 0.01) {
        throw Error("dataset generation aborted: " + std::to_string(failed.size()) + " of " +
                    std::to_string(n) + " solves failed to converge (> 1%)");
    }

    Dataset ds;
    const std::size_t kept = n - failed.size();
    ds.x = linalg::Matrix(kept, d);
    ds.y = linalg::Matrix(kept, 2);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i].failed) {
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
            ds.x(row, j) = slots[i].x[j];
        }
        ds.y(row, 0) = slots[i].y[0];
        ds.y(row, 1) = slots[i].y[1];
        ++row;
    }

    ds.feature_names.reserve(d);
    for (std::size_t j = 1; j <= basis.p; ++j) {
        ds.feature_names.push_back("w" + std::to_string(j));
    }
    for (const std::string& name : config.material.feature_names()) {
        ds.feature_names.push_back(name);
    }
    ds.target_names = {kEdpNames[0], kEdpNames[1]};
    ds.seed = config.seed;
    ds.metadata = {{"basis_id", basis.basis_id},
                   {"generation", config.to_json()},
                   {"weight_bounds", {{"lo", bounds.lo}, {"hi", bounds.hi}}},
                   {"n_requested", n},
                   {"n_failed", failed.size()},
                   {"failed_samples", failed},
                   {"yield_fraction",
                    kept > 0 ? static_cast<double>(yielded) / static_cast<double>(kept) : 0.0}};
    return ds;
}

namespace {

nlohmann::json r2_json(const R2& r) {
    return {{"per_target", r.per_target}, {"mean", r.mean}};
}

std::vector<nlohmann::json> grid_candidates(const nlohmann::json& entry,
                                            const std::string& kind) {
    std::vector<nlohmann::json> out;
    if (entry.is_array()) {
        for (const auto& candidate : entry) {
            out.push_back(candidate);
        }
    } else if (entry.is_object()) {
        out.push_back(entry);
    } else {
        throw ConfigError("grid for '" + kind +
                          "' must be a hyperparameter object or an array of them");
    }
    if (out.empty()) {
        throw ConfigError("grid for '" + kind + "' is empty");
    }
    return out;
}

} // namespace

LeaderboardResult train_leaderboard(const Dataset& ds, const nlohmann::json& grids,
                                    const LeaderboardOptions& opts) {
    if (ds.train_indices.empty() || ds.test_indices.empty()) {
        throw ConfigError("dataset must be split before training (run dataset split)");
    }
    if (!grids.is_object() || grids.empty()) {
        throw ConfigError("training grids must be a non-empty JSON object keyed by model kind");
    }
    for (const auto& [key, value] : grids.items()) {
        regression::kind_from_name(key); // rejects unknown kinds
    }

    LeaderboardResult result;
    const std::array<regression::Kind, 4> order = {
        regression::Kind::DecisionTree, regression::Kind::RandomForest, regression::Kind::Svr,
        regression::Kind::Dnn};
    const linalg::Matrix y_train = regression::gather_rows(ds.y, ds.train_indices);
    const linalg::Matrix y_test = regression::gather_rows(ds.y, ds.test_indices);

    for (regression::Kind kind : order) {
        const std::string name = regression::kind_name(kind);
        if (!grids.contains(name)) {
            continue;
        }
        const std::vector<nlohmann::json> candidates = grid_candidates(grids.at(name), name);

        nlohmann::json chosen;
        nlohmann::json cv_info;
        if (candidates.size() == 1) {
            chosen = candidates.front();
            cv_info = {{"single_candidate", true}};
        } else {
            const regression::CvSelection sel = regression::kfold_grid_search(
                kind, ds.x, ds.y, ds.train_indices, candidates, opts.cv_folds, opts.seed,
                opts.workers);
            chosen = sel.best;
            cv_info = {{"single_candidate", false},
                       {"folds", opts.cv_folds},
                       {"best_index", sel.best_index},
                       {"best_mean_r2", sel.best_mean_r2},
                       {"table", sel.table}};
        }

        const std::vector<std::size_t> monitor =
            kind == regression::Kind::Dnn ? ds.test_indices : std::vector<std::size_t>{};
        std::shared_ptr<const regression::Regressor> model =
            regression::fit(kind, ds.x, ds.y, ds.train_indices, chosen, opts.seed, monitor);

        LeaderboardEntry entry;
        entry.kind = kind;
        entry.hyperparameters = model->hyperparameters();
        entry.cv = cv_info;
        entry.diagnostics = model->diagnostics();
        entry.model = model;

        const linalg::Matrix pred_train = regression::predict_rows(*model, ds.x, ds.train_indices);
        const linalg::Matrix pred_test = regression::predict_rows(*model, ds.x, ds.test_indices);
        entry.train_r2 = r2_score(y_train, pred_train);
        entry.test_r2 = r2_score(y_test, pred_test);
        entry.train_r2_sse = r2_conventional(y_train, pred_train);
        entry.test_r2_sse = r2_conventional(y_test, pred_test);

        if (!opts.output_dir.empty()) {
            std::filesystem::create_directories(opts.output_dir);
            entry.model_file = "model_" + name + ".qmodel";
            nlohmann::json extra = {{"train_r2", r2_json(entry.train_r2)},
                                    {"test_r2", r2_json(entry.test_r2)},
                                    {"seed", opts.seed},
                                    {"dataset_metadata", ds.metadata}};
            regression::save_model(*model, opts.output_dir / entry.model_file, extra);
        }
        result.entries.push_back(std::move(entry));
    }
    if (result.entries.empty()) {
        throw ConfigError("no model kinds selected for training");
    }

    std::stable_sort(result.entries.begin(), result.entries.end(),
                     [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                         return a.test_r2.mean > b.test_r2.mean;
                     });

    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json ranking = nlohmann::json::array();
    for (const LeaderboardEntry& e : result.entries) {
        ranking.push_back(regression::kind_name(e.kind));
        rows.push_back({{"kind", regression::kind_name(e.kind)},
                        {"hyperparameters", e.hyperparameters},
                        {"train_r2", r2_json(e.train_r2)},
                        {"test_r2", r2_json(e.test_r2)},
                        {"train_r2_conventional", r2_json(e.train_r2_sse)},
                        {"test_r2_conventional", r2_json(e.test_r2_sse)},
                        {"cv", e.cv},
                        {"diagnostics", e.diagnostics},
                        {"model_file", e.model_file}});
    }
    result.report = {{"ranking", ranking},
                     {"entries", rows},
                     {"n_train", ds.train_indices.size()},
                     {"n_test", ds.test_indices.size()},
                     {"target_names", ds.target_names},
                     {"cv_folds", opts.cv_folds},
                     {"seed", opts.seed}};

    if (!opts.output_dir.empty()) {
        io::write_json_file(opts.output_dir / "leaderboard.json", result.report);
        write_leaderboard_csv(result, opts.output_dir / "leaderboard.csv");
    }
    return result;
}

namespace {

nlohmann::json summary_stats(std::vector<double> values) {
    if (values.empty()) {
        return {{"n", 0}};
    }
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return {{"n", values.size()},
            {"mean", mean_of(values)},
            {"median", percentile(values, 0.5)},
            {"min", *mn},
            {"max", *mx}};
}

nlohmann::json im_summary(const std::vector<IMReport>& reports) {
    std::vector<double> pgas, arias, lambdas;
    pgas.reserve(reports.size());
    arias.reserve(reports.size());
    lambdas.reserve(reports.size());
    for (const IMReport& r : reports) {
        pgas.push_back(r.pga);
        arias.push_back(r.arias);
        lambdas.push_back(r.lambda1);
    }
    return {{"pga_g", summary_stats(pgas)},
            {"arias_m_per_s", summary_stats(arias)},
            {"lambda1", summary_stats(lambdas)}};
}

struct TruthTask {
    std::vector<double> x;   // surrogate input row
    std::array<double, 2> y; // simulated EDPs
    IMReport im;             // of the simulated motion (generated protocol)
};

/// Shared aggregation: given per-(repeat, sample) truth and predictions,
/// build the sample table, repeat-0 statistics and per-repeat medians.
ValidationReport aggregate_validation(const std::vector<TruthTask>& tasks,
                                      const linalg::Matrix& pred, std::size_t n,
                                      std::size_t repeats, double floor) {
    ValidationReport report;
    report.samples = nlohmann::json::array();
    report.repeat_medians = nlohmann::json::array();

    std::vector<std::vector<std::vector<double>>> errors(
        repeats, std::vector<std::vector<double>>(2));
    std::vector<std::array<std::size_t, 2>> excluded(repeats, {0, 0});

    for (std::size_t r = 0; r < repeats; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t g = r * n + i;
            nlohmann::json row = {{"repeat", r}, {"sample", i}};
            for (std::size_t e = 0; e < 2; ++e) {
                const double truth = tasks[g].y[e];
                const double predicted = pred(g, e);
                const bool skip = std::abs(truth) < floor;
                double pct = 0.0;
                if (!skip) {
                    pct = 100.0 * std::abs(predicted - truth) / std::abs(truth);
                    errors[r][e].push_back(pct);
                } else {
                    ++excluded[r][e];
                }
                row[std::string(kEdpNames[e]) + "_true"] = truth;
                row[std::string(kEdpNames[e]) + "_pred"] = predicted;
                row[std::string(kEdpNames[e]) + "_pct_err"] = pct;
                row[std::string(kEdpNames[e]) + "_excluded"] = skip;
            }
            report.samples.push_back(std::move(row));
        }
    }

    for (std::size_t e = 0; e < 2; ++e) {
        EdpErrorStats stats;
        stats.name = kEdpNames[e];
        stats.percent_errors = errors[0][e];
        stats.excluded = excluded[0][e];
        if (!stats.percent_errors.empty()) {
            stats.median = percentile(stats.percent_errors, 0.5);
            stats.p95 = percentile(stats.percent_errors, 0.95);
            const double hi = *std::max_element(stats.percent_errors.begin(),
                                                stats.percent_errors.end());
            stats.histogram =
                equal_width_histogram(stats.percent_errors, 20, 0.0, hi > 0.0 ? hi : 1.0);
        }
        report.per_edp.push_back(std::move(stats));
    }

    for (std::size_t r = 0; r < repeats; ++r) {
        nlohmann::json medians;
        for (std::size_t e = 0; e < 2; ++e) {
            medians[kEdpNames[e]] =
                errors[r][e].empty() ? 0.0 : percentile(errors[r][e], 0.5);
        }
        report.repeat_medians.push_back(medians);
    }
    return report;
}

} // namespace

ValidationReport validate_generated(const regression::Regressor& model,
                                    const SpectralBasis& basis, const MaterialTemplate& tmpl,
                                    const SuiteMatrix* suite, const ValidationOptions& opts) {
    tmpl.validate();
    if (opts.n_samples < 1 || opts.repeats < 1) {
        throw ConfigError("validation needs n_samples >= 1 and repeats >= 1");
    }
    const std::size_t d = basis.p + 3 * tmpl.n_dof;
    if (model.input_dim() != d) {
        throw ConfigError("model expects " + std::to_string(model.input_dim()) +
                          " features but basis + template give " + std::to_string(d));
    }
    const WeightBounds bounds = weight_bounds(basis);
    const std::size_t n = opts.n_samples;
    const std::size_t total = n * opts.repeats;

    std::vector<TruthTask> tasks(total);
    parallel_for(total, opts.workers, [&](std::size_t g) {
        // One stream per (repeat, sample); the namespace is disjoint from
        // every training-time space, so validation never reuses draws.
        rng::Stream stream(opts.seed, rng::Space::ValidateGenerated, g);
        const WeightVector wv = sample_weights(bounds, stream);
        const std::vector<StorySpec> stories = tmpl.draw(stream);

        GroundMotionRecord motion = reconstruct(basis, wv);
        motion.id = "validate_" + std::to_string(g);
        tasks[g].im = im_report(motion);

        ShearModel structure(stories);
        const ResponseHistory history = newmark_solve(structure, motion);
        const EDP edp = extract_edps(history);
        tasks[g].x = feature_row(wv.w, stories);
        tasks[g].y = {edp.peak_roof_disp, edp.peak_floor_accel};
    });

    linalg::Matrix x(total, d);
    for (std::size_t g = 0; g < total; ++g) {
        for (std::size_t j = 0; j < d; ++j) {
            x(g, j) = tasks[g].x[j];
        }
    }
    const linalg::Matrix pred = model.predict(x);

    ValidationReport report = aggregate_validation(tasks, pred, n, opts.repeats, opts.floor);

    std::vector<IMReport> generated;
    generated.reserve(total);
    for (const TruthTask& t : tasks) {
        generated.push_back(t.im);
    }
    report.extras["im_comparison"] = {{"generated", im_summary(generated)}};
    if (suite != nullptr) {
        report.extras["im_comparison"]["suite"] = im_summary(im_table(*suite));
    }
    report.provenance = {{"protocol", "generated"},
                         {"basis_id", basis.basis_id},
                         {"model_kind", regression::kind_name(model.kind())},
                         {"seed", opts.seed},
                         {"n_samples", n},
                         {"repeats", opts.repeats},
                         {"floor", opts.floor}};
    return report;
}

RecordValidation validate_record(const regression::Regressor& model, const SpectralBasis& basis,
                                 const GroundMotionRecord& record, const MaterialTemplate& tmpl,
                                 const ValidationOptions& opts) {
    tmpl.validate();
    record.validate();
    if (opts.n_samples < 1 || opts.repeats < 1) {
        throw ConfigError("validation needs n_samples >= 1 and repeats >= 1");
    }
    const std::size_t d = basis.p + 3 * tmpl.n_dof;
    if (model.input_dim() != d) {
        throw ConfigError("model expects " + std::to_string(model.input_dim()) +
                          " features but basis + template give " + std::to_string(d));
    }

    // Move the record onto the basis grid. Records already on it pass
    // through untouched so suite members reconstruct to machine precision.
    GroundMotionRecord processed = record;
    if (std::abs(processed.dt - basis.dt) > 1e-12 * basis.dt) {
        processed = resample(processed, basis.dt);
    }
    if (processed.n_samples() != basis.n_steps) {
        processed = pad_or_truncate(processed, basis.n_steps);
    }

    const WeightVector wv = project(basis, processed);
    const GroundMotionRecord recon = reconstruct(basis, wv);

    RecordValidation out;
    double diff2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t i = 0; i < processed.n_samples(); ++i) {
        const double diff = processed.accel[i] - recon.accel[i];
        diff2 += diff * diff;
        ref2 += processed.accel[i] * processed.accel[i];
    }
    out.reconstruction_rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : 0.0;

    const auto delta_pct = [](double reference, double value) {
        return std::abs(reference) > 0.0 ? 100.0 * std::abs(value - reference) / std::abs(reference)
                                         : 0.0;
    };
    const IMReport im_orig = im_report(processed);
    const IMReport im_recon = im_report(recon);
    out.pga_delta_pct = delta_pct(im_orig.pga, im_recon.pga);
    out.arias_delta_pct = delta_pct(im_orig.arias, im_recon.arias);
    out.lambda1_delta_pct = delta_pct(im_orig.lambda1, im_recon.lambda1);

    const GroundMotionRecord& truth_motion = opts.truth_from_reconstruction ? recon : processed;
    const std::size_t n = opts.n_samples;
    const std::size_t total = n * opts.repeats;
    std::vector<TruthTask> tasks(total);
    parallel_for(total, opts.workers, [&](std::size_t g) {
        rng::Stream stream(opts.seed, rng::Space::ValidateRecord, g);
        const std::vector<StorySpec> stories = tmpl.draw(stream);
        ShearModel structure(stories);
        const ResponseHistory history = newmark_solve(structure, truth_motion);
        const EDP edp = extract_edps(history);
        tasks[g].x = feature_row(wv.w, stories);
        tasks[g].y = {edp.peak_roof_disp, edp.peak_floor_accel};
    });

    linalg::Matrix x(total, d);
    for (std::size_t g = 0; g < total; ++g) {
        for (std::size_t j = 0; j < d; ++j) {
            x(g, j) = tasks[g].x[j];
        }
    }
    const linalg::Matrix pred = model.predict(x);
    out.report = aggregate_validation(tasks, pred, n, opts.repeats, opts.floor);

    out.report.extras["reconstruction"] = {
        {"rel_l2", out.reconstruction_rel_l2},
        {"pga_delta_pct", out.pga_delta_pct},
        {"arias_delta_pct", out.arias_delta_pct},
        {"lambda1_delta_pct", out.lambda1_delta_pct},
        {"ground_truth", opts.truth_from_reconstruction ? "reconstruction" : "record"}};
    out.report.provenance = {{"protocol", "record"},
                             {"record_id", record.id},
                             {"basis_id", basis.basis_id},
                             {"model_kind", regression::kind_name(model.kind())},
                             {"seed", opts.seed},
                             {"n_samples", n},
                             {"repeats", opts.repeats},
                             {"floor", opts.floor}};
    return out;
}

nlohmann::json validation_report_json(const ValidationReport& report) {
    nlohmann::json per_edp = nlohmann::json::array();
    for (const EdpErrorStats& s : report.per_edp) {
        per_edp.push_back({{"name", s.name},
                           {"n_errors", s.percent_errors.size()},
                           {"excluded", s.excluded},
                           {"median_pct", s.median},
                           {"p95_pct", s.p95},
                           {"histogram", {{"edges", s.histogram.edges},
                                          {"counts", s.histogram.counts}}}});
    }
    return {{"per_edp", per_edp},
            {"repeat_medians", report.repeat_medians},
            {"extras", report.extras},
            {"provenance", report.provenance}};
}

void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "repeat,sample";
    for (const char* name : kEdpNames) {
        out << ',' << name << "_true," << name << "_pred," << name << "_pct_err," << name
            << "_excluded";
    }
    out << '\n';
    for (const auto& row : report.samples) {
        out << row.at("repeat").get<std::size_t>() << ',' << row.at("sample").get<std::size_t>();
        for (const char* name : kEdpNames) {
            const std::string base(name);
            out << ',' << io::format_full(row.at(base + "_true").get<double>());
            out << ',' << io::format_full(row.at(base + "_pred").get<double>());
            out << ',' << io::format_full(row.at(base + "_pct_err").get<double>());
            out << ',' << (row.at(base + "_excluded").get<bool>() ? 1 : 0);
        }
        out << '\n';
    }
    io::write_text_file(path, out.str());
}

void write_leaderboard_csv(const LeaderboardResult& result, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "rank,kind,test_r2_mean,test_r2_" << kEdpNames[0] << ",test_r2_" << kEdpNames[1]
        << ",train_r2_mean,train_r2_" << kEdpNames[0] << ",train_r2_" << kEdpNames[1] << '\n';
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const LeaderboardEntry& e = result.entries[i];
        out << (i + 1) << ',' << regression::kind_name(e.kind);
        out << ',' << io::format_full(e.test_r2.mean);
        for (double v : e.test_r2.per_target) {
            out << ',' << io::format_full(v);
        }
        out << ',' << io::format_full(e.train_r2.mean);
        for (double v : e.train_r2.per_target) {
            out << ',' << io::format_full(v);
        }
        out << '\n';
    }
    io::write_text_file(path, out.str());
}

} // namespace gms::pipeline
