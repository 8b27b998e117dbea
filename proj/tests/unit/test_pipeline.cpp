#include "doctest.h"

#include "gms/dataset.hpp"
#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/newmark.hpp"
#include "gms/pipeline.hpp"
#include "gms/synthetic.hpp"

#include "support/test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using gms::linalg::Matrix;
namespace pl = gms::pipeline;

namespace {

/// Cheating regressor that simulates instead of interpolating: rebuild the
/// motion from the weight features, rebuild the stories from the material
/// features, run the time integration. Predictions made this way replay the
/// exact arithmetic the validation truth uses, so percent errors collapse
/// to zero and the aggregation layer can be checked in isolation.
class SimulatingOracle final : public gms::regression::Regressor {
public:
    SimulatingOracle(const gms::SpectralBasis& basis, std::size_t n_dof, double hardening)
        : basis_(basis), n_dof_(n_dof), hardening_(hardening) {
        input_dim_ = basis.p + 3 * n_dof;
    }

    gms::regression::Kind kind() const override { return gms::regression::Kind::DecisionTree; }

    Matrix predict(const Matrix& x) const override {
        check_input(x);
        Matrix out(x.rows(), 2);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            gms::WeightVector wv;
            wv.basis_id = basis_.basis_id;
            wv.w.resize(basis_.p);
            for (std::size_t j = 0; j < basis_.p; ++j) {
                wv.w[j] = x(i, j);
            }
            std::vector<gms::StorySpec> stories(n_dof_);
            for (std::size_t s = 0; s < n_dof_; ++s) {
                stories[s].stiffness = x(i, basis_.p + 3 * s);
                stories[s].yield_force = x(i, basis_.p + 3 * s + 1);
                stories[s].damping_ratio = x(i, basis_.p + 3 * s + 2);
                stories[s].hardening_ratio = hardening_;
            }
            const gms::GroundMotionRecord motion = gms::reconstruct(basis_, wv);
            gms::ShearModel structure(stories);
            const gms::ResponseHistory history = gms::newmark_solve(structure, motion);
            const gms::EDP edp = gms::extract_edps(history);
            out(i, 0) = edp.peak_roof_disp;
            out(i, 1) = edp.peak_floor_accel;
        }
        return out;
    }

    nlohmann::json hyperparameters() const override { return nlohmann::json::object(); }
    void write_blob(std::ostream&) const override {}

private:
    const gms::SpectralBasis& basis_;
    std::size_t n_dof_;
    double hardening_;
};

gms::SpectralBasis small_basis(std::size_t count, std::uint64_t seed) {
    const gms::SuiteMatrix suite = gms::synthetic_suite(count, seed, 0.02, 20.0);
    return gms::svd_thin(suite);
}

} // namespace

TEST_CASE("material template json round trip and validation") {
    const nlohmann::json j = {{"n_dof", 2},
                              {"E", {30.0, 50.0}},
                              {"Fy", {0.2, 0.4}},
                              {"xi", {0.03, 0.07}},
                              {"b", 0.05}};
    const pl::MaterialTemplate tmpl = pl::MaterialTemplate::from_json(j);
    CHECK(tmpl.n_dof == 2);
    CHECK(tmpl.stiffness.lo == 30.0);
    CHECK(tmpl.stiffness.hi == 50.0);
    CHECK(tmpl.yield_force.lo == 0.2);
    CHECK(tmpl.damping_ratio.hi == 0.07);
    CHECK(tmpl.hardening_ratio == 0.05);
    CHECK(pl::MaterialTemplate::from_json(tmpl.to_json()).to_json() == tmpl.to_json());

    nlohmann::json bad = j;
    bad["stories"] = 3;
    CHECK_THROWS_AS(pl::MaterialTemplate::from_json(bad), gms::ConfigError);

    pl::MaterialTemplate inverted;
    inverted.stiffness = {48.0, 32.0}; // lo > hi
    CHECK_THROWS_AS(inverted.validate(), gms::ConfigError);
}

TEST_CASE("material draws are story-major and honor degenerate supports") {
    pl::MaterialTemplate tmpl;
    tmpl.n_dof = 3;
    tmpl.damping_ratio = {0.05, 0.05}; // pinned

    gms::rng::Stream stream(11, gms::rng::Space::Generation, 4);
    const std::vector<gms::StorySpec> stories = tmpl.draw(stream);
    REQUIRE(stories.size() == 3);

    // Replaying the stream must reproduce the exact draw order: E, Fy, xi
    // per story, stories in ascending order.
    gms::rng::Stream replay(11, gms::rng::Space::Generation, 4);
    for (const gms::StorySpec& s : stories) {
        CHECK(s.stiffness == replay.uniform(tmpl.stiffness.lo, tmpl.stiffness.hi));
        CHECK(s.yield_force == replay.uniform(tmpl.yield_force.lo, tmpl.yield_force.hi));
        CHECK(s.damping_ratio ==
              replay.uniform(tmpl.damping_ratio.lo, tmpl.damping_ratio.hi));
        CHECK(s.damping_ratio == 0.05);
        CHECK(s.hardening_ratio == tmpl.hardening_ratio);
    }

    CHECK(tmpl.feature_names() ==
          std::vector<std::string>{"E1", "Fy1", "xi1", "E2", "Fy2", "xi2", "E3", "Fy3", "xi3"});
}

TEST_CASE("dataset generation is reproducible and worker-independent") {
    const gms::SpectralBasis basis = small_basis(8, 901);

    pl::GenerationConfig config;
    config.n_samples = 40;
    config.seed = 31;
    config.workers = 1;
    const gms::Dataset one = pl::generate_dataset(basis, config);

    config.workers = 3;
    const gms::Dataset three = pl::generate_dataset(basis, config);

    REQUIRE(one.n() == 40);
    CHECK(one.x.data() == three.x.data());
    CHECK(one.y.data() == three.y.data());

    CHECK(one.dim() == basis.p + 3);
    REQUIRE(one.feature_names.size() == one.dim());
    CHECK(one.feature_names[0] == "w1");
    CHECK(one.feature_names[basis.p - 1] == "w" + std::to_string(basis.p));
    CHECK(one.feature_names[basis.p] == "E1");
    CHECK(one.feature_names[basis.p + 2] == "xi1");
    CHECK(one.target_names ==
          std::vector<std::string>{"peak_roof_disp", "peak_floor_accel"});

    CHECK(one.metadata.at("basis_id").get<std::string>() == basis.basis_id);
    CHECK(one.metadata.at("n_requested").get<std::size_t>() == 40);
    CHECK(one.metadata.at("n_failed").get<std::size_t>() == 0);
    const double yf = one.metadata.at("yield_fraction").get<double>();
    CHECK(yf >= 0.0);
    CHECK(yf <= 1.0);

    // Weights land inside the suite-observed bounds by construction.
    const gms::WeightBounds bounds = gms::weight_bounds(basis);
    for (std::size_t i = 0; i < one.n(); ++i) {
        for (std::size_t j = 0; j < basis.p; ++j) {
            CHECK(one.x(i, j) >= bounds.lo[j]);
            CHECK(one.x(i, j) <= bounds.hi[j]);
        }
    }

    config.seed = 32;
    config.workers = 1;
    const gms::Dataset other = pl::generate_dataset(basis, config);
    CHECK(one.x.data() != other.x.data());
}

TEST_CASE("split is disjoint, sized by rounding, and seed-deterministic") {
    const gms::SpectralBasis basis = small_basis(6, 903);
    pl::GenerationConfig config;
    config.n_samples = 37;
    config.seed = 5;
    gms::Dataset ds = pl::generate_dataset(basis, config);

    gms::split_dataset(ds, 0.25, 100);
    CHECK(ds.test_indices.size() == 9); // round(37 * 0.25)
    CHECK(ds.train_indices.size() == 28);

    std::set<std::size_t> seen(ds.train_indices.begin(), ds.train_indices.end());
    seen.insert(ds.test_indices.begin(), ds.test_indices.end());
    CHECK(seen.size() == 37);
    CHECK(*seen.rbegin() == 36);

    gms::Dataset again = ds;
    again.train_indices.clear();
    again.test_indices.clear();
    gms::split_dataset(again, 0.25, 100);
    CHECK(again.train_indices == ds.train_indices);
    CHECK(again.test_indices == ds.test_indices);

    gms::split_dataset(again, 0.25, 101);
    CHECK(again.test_indices != ds.test_indices);
}

TEST_CASE("datasets survive the file round trip bit-exactly") {
    helpers::TempDir dir("dataset");
    const gms::SpectralBasis basis = small_basis(6, 905);
    pl::GenerationConfig config;
    config.n_samples = 25;
    config.seed = 8;
    gms::Dataset ds = pl::generate_dataset(basis, config);
    gms::split_dataset(ds, 0.2, 9);

    const auto path = dir / "sample.qdata";
    gms::save_dataset(ds, path);
    CHECK(std::filesystem::exists(path.string() + ".json"));

    const gms::Dataset back = gms::load_dataset(path);
    CHECK(back.x.data() == ds.x.data());
    CHECK(back.y.data() == ds.y.data());
    CHECK(back.feature_names == ds.feature_names);
    CHECK(back.target_names == ds.target_names);
    CHECK(back.train_indices == ds.train_indices);
    CHECK(back.test_indices == ds.test_indices);
    CHECK(back.seed == ds.seed);
    CHECK(back.metadata == ds.metadata);
}

TEST_CASE("the leaderboard ranks models and persists every artifact") {
    helpers::TempDir dir("leaderboard");
    const gms::SpectralBasis basis = small_basis(6, 907);
    pl::GenerationConfig config;
    config.n_samples = 160;
    config.seed = 12;
    gms::Dataset ds = pl::generate_dataset(basis, config);

    pl::LeaderboardOptions opts;
    opts.cv_folds = 3;
    opts.seed = 77;
    const nlohmann::json grids = {
        {"dt", {{"max_depth", 6}}},
        {"rf", nlohmann::json::array({{{"n_trees", 4}}, {{"n_trees", 8}}})},
    };
    CHECK_THROWS_AS(pl::train_leaderboard(ds, grids, opts), gms::ConfigError); // unsplit

    gms::split_dataset(ds, 0.2, 13);
    opts.output_dir = dir.path();
    const pl::LeaderboardResult result = pl::train_leaderboard(ds, grids, opts);

    REQUIRE(result.entries.size() == 2);
    CHECK(result.entries[0].test_r2.mean >= result.entries[1].test_r2.mean);
    for (const pl::LeaderboardEntry& e : result.entries) {
        CHECK(e.model != nullptr);
        CHECK(std::filesystem::exists(dir / e.model_file));
        CHECK(std::filesystem::exists(dir / (e.model_file + ".json")));
        CHECK(e.train_r2.per_target.size() == 2);
    }
    CHECK(std::filesystem::exists(dir / "leaderboard.json"));
    CHECK(std::filesystem::exists(dir / "leaderboard.csv"));

    // The persisted model reproduces the in-memory predictions.
    for (const pl::LeaderboardEntry& e : result.entries) {
        const auto loaded = gms::regression::load_model(dir / e.model_file);
        CHECK(loaded->predict(ds.x).data() == e.model->predict(ds.x).data());
    }

    // The CV table exists only where a real grid was searched.
    for (const pl::LeaderboardEntry& e : result.entries) {
        if (e.kind == gms::regression::Kind::DecisionTree) {
            CHECK(e.cv.at("single_candidate").get<bool>());
        } else {
            CHECK(!e.cv.at("single_candidate").get<bool>());
            CHECK(e.cv.at("table").size() == 2);
        }
    }

    // Reruns with identical inputs produce the identical report.
    const pl::LeaderboardResult again = pl::train_leaderboard(ds, grids, opts);
    CHECK(result.report.dump() == again.report.dump());

    CHECK_THROWS_AS(pl::train_leaderboard(ds, {{"gbm", {{"x", 1}}}}, opts), gms::ConfigError);
    CHECK_THROWS_AS(pl::train_leaderboard(ds, nlohmann::json::object(), opts),
                    gms::ConfigError);

    std::ifstream csv(dir / "leaderboard.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "rank,kind,test_r2_mean,test_r2_peak_roof_disp,test_r2_peak_floor_accel,"
          "train_r2_mean,train_r2_peak_roof_disp,train_r2_peak_floor_accel");
}

TEST_CASE("a simulating oracle drives generated-motion validation errors to zero") {
    const gms::SuiteMatrix suite = gms::synthetic_suite(6, 909, 0.02, 20.0);
    const gms::SpectralBasis basis = gms::svd_thin(suite);
    pl::MaterialTemplate tmpl;
    const SimulatingOracle oracle(basis, tmpl.n_dof, tmpl.hardening_ratio);

    pl::ValidationOptions opts;
    opts.n_samples = 12;
    opts.seed = 3;
    const pl::ValidationReport report =
        pl::validate_generated(oracle, basis, tmpl, &suite, opts);

    REQUIRE(report.per_edp.size() == 2);
    for (const pl::EdpErrorStats& s : report.per_edp) {
        REQUIRE(s.percent_errors.size() == 12);
        CHECK(s.excluded == 0);
        CHECK(s.median == 0.0);
        CHECK(s.p95 == 0.0);
        std::size_t total = 0;
        for (std::size_t c : s.histogram.counts) {
            total += c;
        }
        CHECK(total == 12);
        CHECK(s.histogram.counts[0] == 12); // everything in the zero bin
    }
    CHECK(report.samples.size() == 12);
    CHECK(report.repeat_medians.size() == 1);
    CHECK(report.extras.at("im_comparison").contains("generated"));
    CHECK(report.extras.at("im_comparison").contains("suite"));
    CHECK(report.provenance.at("protocol") == "generated");

    // Without a suite pointer the comparison table shrinks accordingly.
    const pl::ValidationReport bare =
        pl::validate_generated(oracle, basis, tmpl, nullptr, opts);
    CHECK(!bare.extras.at("im_comparison").contains("suite"));

    pl::ValidationOptions bad = opts;
    bad.n_samples = 0;
    CHECK_THROWS_AS(pl::validate_generated(oracle, basis, tmpl, nullptr, bad),
                    gms::ConfigError);
}

TEST_CASE("validation csv rows reproduce the reported statistics exactly") {
    helpers::TempDir dir("valcsv");
    const gms::SuiteMatrix suite = gms::synthetic_suite(5, 911, 0.02, 20.0);
    const gms::SpectralBasis basis = gms::svd_thin(suite);
    pl::MaterialTemplate tmpl;

    // A deliberately crude model so percent errors are non-trivial.
    pl::GenerationConfig gen;
    gen.n_samples = 60;
    gen.seed = 19;
    gms::Dataset ds = pl::generate_dataset(basis, gen);
    gms::split_dataset(ds, 0.2, 20);
    const auto model = gms::regression::fit(gms::regression::Kind::DecisionTree, ds.x, ds.y,
                                            ds.train_indices, {{"max_depth", 3}}, 21);

    pl::ValidationOptions opts;
    opts.n_samples = 17;
    opts.seed = 23;
    const pl::ValidationReport report =
        pl::validate_generated(*model, basis, tmpl, nullptr, opts);
    const auto csv_path = dir / "errors.csv";
    pl::write_validation_csv(report, csv_path);

    std::ifstream in(csv_path);
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "repeat,sample,peak_roof_disp_true,peak_roof_disp_pred,peak_roof_disp_pct_err,"
          "peak_roof_disp_excluded,peak_floor_accel_true,peak_floor_accel_pred,"
          "peak_floor_accel_pct_err,peak_floor_accel_excluded");

    std::vector<std::vector<double>> errors(2);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        REQUIRE(cells.size() == 10);
        if (cells[5] == "0") {
            errors[0].push_back(std::stod(cells[4]));
        }
        if (cells[9] == "0") {
            errors[1].push_back(std::stod(cells[8]));
        }
    }
    CHECK(rows == 17);

    // format_full printing round-trips doubles, so recomputing the order
    // statistics from the file must match the report bit for bit.
    for (std::size_t e = 0; e < 2; ++e) {
        REQUIRE(errors[e].size() == report.per_edp[e].percent_errors.size());
        CHECK(gms::percentile(errors[e], 0.5) == report.per_edp[e].median);
        CHECK(gms::percentile(errors[e], 0.95) == report.per_edp[e].p95);
    }
}

TEST_CASE("suite members ablate cleanly through the record protocol") {
    const gms::SuiteMatrix suite = gms::synthetic_suite(6, 913, 0.02, 20.0);
    const gms::SpectralBasis basis = gms::svd_thin(suite);
    pl::MaterialTemplate tmpl;
    const SimulatingOracle oracle(basis, tmpl.n_dof, tmpl.hardening_ratio);
    const gms::GroundMotionRecord member = suite.column(2);

    pl::ValidationOptions opts;
    opts.n_samples = 8;
    opts.seed = 29;
    const pl::RecordValidation rv =
        pl::validate_record(oracle, basis, member, tmpl, opts);

    // A full-rank basis reproduces its own suite columns.
    CHECK(rv.reconstruction_rel_l2 <= 1e-9);
    CHECK(rv.pga_delta_pct <= 1e-6);
    CHECK(rv.arias_delta_pct <= 1e-6);
    CHECK(rv.lambda1_delta_pct <= 1e-6);

    // Truth ran on the record, the oracle on its reconstruction; with the
    // reconstruction this tight the EDP gap is noise.
    for (const pl::EdpErrorStats& s : rv.report.per_edp) {
        REQUIRE(s.percent_errors.size() == 8);
        CHECK(s.median <= 1e-4);
    }
    CHECK(rv.report.provenance.at("protocol") == "record");
    CHECK(rv.report.extras.at("reconstruction").at("ground_truth") == "record");

    // The ablation switch removes even that residual.
    opts.truth_from_reconstruction = true;
    const pl::RecordValidation ablated =
        pl::validate_record(oracle, basis, member, tmpl, opts);
    for (const pl::EdpErrorStats& s : ablated.report.per_edp) {
        CHECK(s.median == 0.0);
        CHECK(s.p95 == 0.0);
    }
    CHECK(ablated.report.extras.at("reconstruction").at("ground_truth") == "reconstruction");
}
