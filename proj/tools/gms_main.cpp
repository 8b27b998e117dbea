// gms: command line front end for the ground-motion surrogate toolkit.
// Thin dispatcher only; every capability lives in the core library.

#include "gms/dataset.hpp"
#include "gms/error.hpp"
#include "gms/ground_motion.hpp"
#include "gms/intensity.hpp"
#include "gms/io.hpp"
#include "gms/newmark.hpp"
#include "gms/pipeline.hpp"
#include "gms/regression/cv.hpp"
#include "gms/regression/model.hpp"
#include "gms/rng.hpp"
#include "gms/shear_model.hpp"
#include "gms/spectral_basis.hpp"
#include "gms/synthetic.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0;
    fs::path log_file = "gms.log";
    bool manifest_only = false;
    std::vector<std::string> argv_echo;
};

Globals g_opts;

void log_line(const std::string& line) {
    std::ofstream out(g_opts.log_file, std::ios::app);
    if (out) {
        out << line << '\n';
    }
}

/// Config-class files (JSON the user wrote) get exit code 2 on any problem,
/// including absence; binary artifacts keep IoError semantics.
json load_config_json(const fs::path& path) {
    if (!fs::exists(path)) {
        throw gms::ConfigError("config file not found: " + path.string());
    }
    return gms::io::read_json_file(path);
}

json manifest_base(const std::string& verb) {
    json m;
    m["tool"] = "gms";
    m["version"] = kVersion;
    m["command"] = verb;
    m["seed"] = g_opts.seed;
    m["workers"] = g_opts.workers;
    m["inputs"] = json::object();
    m["outputs"] = json::array();
    return m;
}

void manifest_input(json& m, const std::string& role, const fs::path& path) {
    m["inputs"][role] = {{"path", path.string()}, {"sha256", gms::io::sha256_file(path)}};
}

void manifest_output(json& m, const fs::path& path) {
    m["outputs"].push_back(path.string());
}

/// File outputs get a sibling <out>.manifest.json; directory outputs get
/// <dir>/manifest.json.
void write_manifest(const json& m, const fs::path& primary_output, bool output_is_dir) {
    const fs::path target = output_is_dir ? primary_output / "manifest.json"
                                          : fs::path(primary_output.string() + ".manifest.json");
    if (output_is_dir) {
        fs::create_directories(primary_output);
    } else if (primary_output.has_parent_path()) {
        fs::create_directories(primary_output.parent_path());
    }
    gms::io::write_json_file(target, m);
}

gms::GroundMotionRecord prepare_record_for_basis(gms::GroundMotionRecord record,
                                                 const gms::SpectralBasis& basis) {
    if (std::abs(record.dt - basis.dt) > 1e-12 * basis.dt) {
        record = gms::resample(record, basis.dt);
    }
    if (record.n_samples() != basis.n_steps) {
        record = gms::pad_or_truncate(record, basis.n_steps);
    }
    return record;
}

// ---------------------------------------------------------------- ingest --

struct IngestArgs {
    std::vector<std::string> files;
    std::string list_file;
    std::size_t synthetic = 0;
    double dt = 0.02;
    double duration = 0.0; // 0: inferred
    std::string out;
};

void run_ingest(const IngestArgs& a) {
    json manifest = manifest_base("ingest");
    gms::SuiteMatrix suite;
    if (a.synthetic > 0) {
        if (!a.files.empty() || !a.list_file.empty()) {
            throw gms::ConfigError("--synthetic cannot be combined with record files");
        }
        const double duration = a.duration > 0.0 ? a.duration : 88.0;
        manifest["options"] = {{"synthetic", a.synthetic},
                               {"dt", a.dt},
                               {"duration", duration}};
        if (!g_opts.manifest_only) {
            suite = gms::synthetic_suite(a.synthetic, g_opts.seed, a.dt, duration);
        }
    } else {
        std::vector<std::string> paths = a.files;
        if (!a.list_file.empty()) {
            std::istringstream lines(gms::io::read_text_file(a.list_file));
            std::string line;
            while (std::getline(lines, line)) {
                if (!line.empty()) {
                    paths.push_back(line);
                }
            }
        }
        if (paths.empty()) {
            throw gms::ConfigError("no input records: pass files, --list, or --synthetic");
        }
        std::vector<gms::GroundMotionRecord> records;
        records.reserve(paths.size());
        for (const std::string& p : paths) {
            records.push_back(gms::load_record(p));
            manifest_input(manifest, "record:" + records.back().id, p);
        }
        double duration = a.duration;
        if (duration <= 0.0) {
            for (const auto& r : records) {
                duration = std::max(duration, r.duration());
            }
        }
        manifest["options"] = {{"dt", a.dt}, {"duration", duration}};
        if (!g_opts.manifest_only) {
            suite = gms::build_suite(records, a.dt, duration);
        }
    }
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, /*output_is_dir=*/false);
    if (g_opts.manifest_only) {
        return;
    }
    gms::save_suite(suite, a.out);
    std::cout << "suite: " << suite.m() << " records, " << suite.n_steps << " steps at dt "
              << suite.dt << " -> " << a.out << "\n";
}

// ----------------------------------------------------------------- basis --

struct BasisBuildArgs {
    std::string suite;
    std::string out;
    std::size_t rank = 0;
    double tau = 0.0;
};

void run_basis_build(const BasisBuildArgs& a) {
    if (a.rank > 0 && a.tau > 0.0) {
        throw gms::ConfigError("--rank and --tau are mutually exclusive");
    }
    json manifest = manifest_base("basis build");
    manifest_input(manifest, "suite", a.suite);
    manifest["options"] = {{"rank", a.rank}, {"tau", a.tau}};
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }
    const gms::SuiteMatrix suite = gms::load_suite(a.suite);
    gms::SpectralBasis basis = gms::svd_thin(suite);
    if (a.rank > 0) {
        basis = gms::truncate_rank(basis, a.rank);
    } else if (a.tau > 0.0) {
        basis = gms::truncate_variance(basis, a.tau);
    }
    const gms::ExplainedVariance ev = gms::explained_variance(basis);
    const json provenance = {{"suite_sha256", gms::io::sha256_file(a.suite)},
                             {"rank", a.rank},
                             {"tau", a.tau}};
    gms::save_basis(basis, a.out, provenance);
    std::cout << "basis: p = " << basis.p << " of " << basis.m() << " directions, cumulative "
              << "explained variance " << ev.cumulative[basis.p - 1] << " -> " << a.out << "\n";
}

struct BasisProjectArgs {
    std::string basis;
    std::string record;
    std::string out;
};

void run_basis_project(const BasisProjectArgs& a) {
    json manifest = manifest_base("basis project");
    manifest_input(manifest, "basis", a.basis);
    manifest_input(manifest, "record", a.record);
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    const gms::GroundMotionRecord record =
        prepare_record_for_basis(gms::load_record(a.record), basis);
    const gms::WeightVector wv = gms::project(basis, record);
    gms::io::write_json_file(
        a.out, json{{"basis_id", wv.basis_id}, {"record_id", record.id}, {"w", wv.w}});
    std::cout << "projected " << record.id << " onto " << basis.p << " directions -> " << a.out
              << "\n";
}

struct BasisReconstructArgs {
    std::string basis;
    std::string weights;
    std::string record;
    std::string out;
};

void run_basis_reconstruct(const BasisReconstructArgs& a) {
    if (a.weights.empty() == a.record.empty()) {
        throw gms::ConfigError("pass exactly one of --weights or --record");
    }
    // Load user-written config before anything hashes it into the manifest,
    // so its absence exits with config semantics rather than IoError.
    json weights_json;
    if (!a.weights.empty()) {
        weights_json = load_config_json(a.weights);
    }
    json manifest = manifest_base("basis reconstruct");
    manifest_input(manifest, "basis", a.basis);
    if (!a.weights.empty()) {
        manifest_input(manifest, "weights", a.weights);
    } else {
        manifest_input(manifest, "record", a.record);
    }
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    gms::WeightVector wv;
    if (!a.weights.empty()) {
        const json& w = weights_json;
        try {
            wv.basis_id = w.at("basis_id").get<std::string>();
            wv.w = w.at("w").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw gms::ConfigError(std::string("weights file: ") + e.what());
        }
    } else {
        wv = gms::project(basis, prepare_record_for_basis(gms::load_record(a.record), basis));
    }
    gms::GroundMotionRecord recon = gms::reconstruct(basis, wv);
    recon.id = fs::path(a.out).stem().string();
    gms::save_record_csv(recon, a.out);
    std::cout << "reconstructed " << recon.n_samples() << " samples -> " << a.out << "\n";
}

struct BasisSampleArgs {
    std::string basis;
    std::size_t count = 1;
    std::string out;
    std::string motions_dir;
};

void run_basis_sample(const BasisSampleArgs& a) {
    json manifest = manifest_base("basis sample");
    manifest_input(manifest, "basis", a.basis);
    manifest["options"] = {{"count", a.count}};
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    const gms::WeightBounds bounds = gms::weight_bounds(basis);
    json samples = json::array();
    if (!a.motions_dir.empty()) {
        fs::create_directories(a.motions_dir);
    }
    for (std::size_t i = 0; i < a.count; ++i) {
        gms::rng::Stream stream(g_opts.seed, gms::rng::Space::WeightSample, i);
        const gms::WeightVector wv = gms::sample_weights(bounds, stream);
        samples.push_back(wv.w);
        if (!a.motions_dir.empty()) {
            gms::GroundMotionRecord motion = gms::reconstruct(basis, wv);
            motion.id = "sample_" + std::to_string(i);
            gms::save_record_csv(motion, fs::path(a.motions_dir) / (motion.id + ".csv"));
        }
    }
    gms::io::write_json_file(a.out, json{{"basis_id", basis.basis_id},
                                         {"seed", g_opts.seed},
                                         {"bounds", {{"lo", bounds.lo}, {"hi", bounds.hi}}},
                                         {"samples", samples}});
    std::cout << "sampled " << a.count << " weight vectors -> " << a.out << "\n";
}

// -------------------------------------------------------------- simulate --

struct SimulateArgs {
    std::string record;
    std::string stories;
    std::string out;
    bool edp_only = false;
};

void run_simulate(const SimulateArgs& a) {
    if (!a.edp_only && a.out.empty()) {
        throw gms::ConfigError("--out is required unless --edp-only prints to stdout");
    }
    gms::ShearModel model = gms::ShearModel::from_json(load_config_json(a.stories));
    json manifest = manifest_base("simulate");
    manifest_input(manifest, "record", a.record);
    manifest_input(manifest, "stories", a.stories);
    manifest["options"] = {{"edp_only", a.edp_only}};
    if (!a.out.empty()) {
        manifest_output(manifest, a.out);
        write_manifest(manifest, a.out, false);
    }
    if (g_opts.manifest_only) {
        return;
    }
    const gms::GroundMotionRecord record = gms::load_record(a.record);
    const gms::ResponseHistory history = gms::newmark_solve(model, record);
    if (a.edp_only) {
        const gms::EDP edp = gms::extract_edps(history);
        const json out = {{"peak_roof_disp", edp.peak_roof_disp},
                          {"peak_floor_accel_g", edp.peak_floor_accel_g()}};
        if (a.out.empty()) {
            std::cout << out.dump(2) << "\n";
        } else {
            gms::io::write_json_file(a.out, out);
        }
    } else {
        gms::save_response_csv(history, a.out);
        std::cout << "response: " << history.n_steps() << " steps x " << history.n_dof()
                  << " stories -> " << a.out << "\n";
    }
}

// --------------------------------------------------------------- dataset --

struct DatasetGenerateArgs {
    std::string basis;
    std::string config;
    std::string out;
};

void run_dataset_generate(const DatasetGenerateArgs& a) {
    gms::pipeline::GenerationConfig config =
        gms::pipeline::GenerationConfig::from_json(load_config_json(a.config));
    json manifest = manifest_base("dataset generate");
    manifest_input(manifest, "basis", a.basis);
    manifest_input(manifest, "config", a.config);
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);

    if (g_opts.seed_given) {
        config.seed = g_opts.seed;
    }
    if (g_opts.workers != 0) {
        config.workers = g_opts.workers;
    }
    if (g_opts.manifest_only) {
        return;
    }
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    gms::Dataset ds = gms::pipeline::generate_dataset(basis, config);
    gms::save_dataset(ds, a.out);
    std::cout << "dataset: " << ds.n() << " rows x " << ds.dim() << " features ("
              << ds.metadata.at("n_failed").get<std::size_t>() << " failed solves, yield fraction "
              << ds.metadata.at("yield_fraction").get<double>() << ") -> " << a.out << "\n";
}

struct DatasetSplitArgs {
    std::string data;
    double test_fraction = 0.1;
    std::string out;
};

void run_dataset_split(const DatasetSplitArgs& a) {
    const std::string out = a.out.empty() ? a.data : a.out;
    json manifest = manifest_base("dataset split");
    manifest_input(manifest, "data", a.data);
    manifest["options"] = {{"test_fraction", a.test_fraction}};
    manifest_output(manifest, out);
    write_manifest(manifest, out, false);
    if (g_opts.manifest_only) {
        return;
    }
    gms::Dataset ds = gms::load_dataset(a.data);
    gms::split_dataset(ds, a.test_fraction, g_opts.seed);
    ds.metadata["split"] = {{"test_fraction", a.test_fraction}, {"seed", g_opts.seed}};
    gms::save_dataset(ds, out);
    std::cout << "split: " << ds.train_indices.size() << " train / " << ds.test_indices.size()
              << " test -> " << out << "\n";
}

// ----------------------------------------------------------------- train --

struct TrainArgs {
    std::string data;
    std::string kind;
    std::string hyper;
    std::string grid;
    std::size_t folds = 5;
    std::string out;
};

void run_train(const TrainArgs& a) {
    const gms::regression::Kind kind = gms::regression::kind_from_name(a.kind);
    json chosen = a.hyper.empty() ? json::object() : load_config_json(a.hyper);
    json grid_json;
    if (!a.grid.empty()) {
        grid_json = load_config_json(a.grid);
        if (!grid_json.is_array() || grid_json.empty()) {
            throw gms::ConfigError("--grid must be a non-empty JSON array of candidates");
        }
    }
    json manifest = manifest_base("train");
    manifest_input(manifest, "data", a.data);
    if (!a.hyper.empty()) {
        manifest_input(manifest, "hyper", a.hyper);
    }
    if (!a.grid.empty()) {
        manifest_input(manifest, "grid", a.grid);
    }
    manifest["options"] = {{"kind", a.kind}, {"folds", a.folds}};
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }

    const gms::Dataset ds = gms::load_dataset(a.data);
    std::vector<std::size_t> train = ds.train_indices;
    if (train.empty()) {
        // Unsplit dataset: fit on everything.
        train.resize(ds.n());
        for (std::size_t i = 0; i < train.size(); ++i) {
            train[i] = i;
        }
    }

    json cv_info;
    if (!a.grid.empty()) {
        std::vector<json> candidates(grid_json.begin(), grid_json.end());
        const gms::regression::CvSelection sel = gms::regression::kfold_grid_search(
            kind, ds.x, ds.y, train, candidates, a.folds, g_opts.seed, g_opts.workers);
        chosen = sel.best;
        cv_info = {{"folds", a.folds},
                   {"best_index", sel.best_index},
                   {"best_mean_r2", sel.best_mean_r2},
                   {"table", sel.table}};
    }

    const std::vector<std::size_t> monitor =
        kind == gms::regression::Kind::Dnn ? ds.test_indices : std::vector<std::size_t>{};
    const auto model = gms::regression::fit(kind, ds.x, ds.y, train, chosen, g_opts.seed, monitor);

    json extra = {{"seed", g_opts.seed}, {"dataset_sha256", gms::io::sha256_file(a.data)}};
    const gms::linalg::Matrix train_pred = gms::regression::predict_rows(*model, ds.x, train);
    const gms::R2 train_r2 = gms::r2_score(gms::regression::gather_rows(ds.y, train), train_pred);
    extra["train_r2"] = {{"per_target", train_r2.per_target}, {"mean", train_r2.mean}};
    if (!ds.test_indices.empty()) {
        const gms::R2 test_r2 =
            gms::r2_score(gms::regression::gather_rows(ds.y, ds.test_indices),
                          gms::regression::predict_rows(*model, ds.x, ds.test_indices));
        extra["test_r2"] = {{"per_target", test_r2.per_target}, {"mean", test_r2.mean}};
        std::cout << "train R2 " << train_r2.mean << ", test R2 " << test_r2.mean << "\n";
    } else {
        std::cout << "train R2 " << train_r2.mean << "\n";
    }
    if (!cv_info.is_null()) {
        extra["cv"] = cv_info;
    }
    gms::regression::save_model(*model, a.out, extra);
    std::cout << "model " << a.kind << " -> " << a.out << "\n";
}

// ----------------------------------------------------------- leaderboard --

struct LeaderboardArgs {
    std::string data;
    std::string grids;
    std::string out_dir;
    std::size_t folds = 5;
};

void run_leaderboard(const LeaderboardArgs& a) {
    const json grids = load_config_json(a.grids);
    json manifest = manifest_base("leaderboard");
    manifest_input(manifest, "data", a.data);
    manifest_input(manifest, "grids", a.grids);
    manifest["options"] = {{"folds", a.folds}};
    manifest_output(manifest, fs::path(a.out_dir) / "leaderboard.json");
    write_manifest(manifest, a.out_dir, /*output_is_dir=*/true);
    if (g_opts.manifest_only) {
        return;
    }
    const gms::Dataset ds = gms::load_dataset(a.data);
    gms::pipeline::LeaderboardOptions opts;
    opts.cv_folds = a.folds;
    opts.seed = g_opts.seed;
    opts.workers = g_opts.workers;
    opts.output_dir = a.out_dir;
    const gms::pipeline::LeaderboardResult result =
        gms::pipeline::train_leaderboard(ds, grids, opts);
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const auto& e = result.entries[i];
        std::cout << (i + 1) << ". " << gms::regression::kind_name(e.kind) << "  test R2 "
                  << e.test_r2.mean << "  train R2 " << e.train_r2.mean << "\n";
    }
    std::cout << "artifacts -> " << a.out_dir << "\n";
}

// -------------------------------------------------------------- validate --

struct ValidateArgs {
    std::string model;
    std::string basis;
    std::string tmpl;
    std::string suite;  // generated protocol, optional
    std::string record; // record protocol
    std::size_t n = 50;
    std::size_t repeats = 1;
    bool truth_from_reconstruction = false;
    std::string out_dir;
};

void write_validation_outputs(const gms::pipeline::ValidationReport& report,
                              const fs::path& out_dir) {
    fs::create_directories(out_dir);
    gms::io::write_json_file(out_dir / "report.json",
                             gms::pipeline::validation_report_json(report));
    gms::pipeline::write_validation_csv(report, out_dir / "errors.csv");
    for (const auto& edp : report.per_edp) {
        std::cout << edp.name << ": median " << edp.median << "%, p95 " << edp.p95 << "% ("
                  << edp.percent_errors.size() << " samples, " << edp.excluded << " excluded)\n";
    }
    std::cout << "report -> " << (out_dir / "report.json").string() << "\n";
}

void run_validate_generated(const ValidateArgs& a) {
    const gms::pipeline::MaterialTemplate tmpl =
        gms::pipeline::MaterialTemplate::from_json(load_config_json(a.tmpl));
    json manifest = manifest_base("validate generated");
    manifest_input(manifest, "model", a.model);
    manifest_input(manifest, "basis", a.basis);
    manifest_input(manifest, "template", a.tmpl);
    if (!a.suite.empty()) {
        manifest_input(manifest, "suite", a.suite);
    }
    manifest["options"] = {{"n", a.n}, {"repeats", a.repeats}};
    manifest_output(manifest, fs::path(a.out_dir) / "report.json");
    manifest_output(manifest, fs::path(a.out_dir) / "errors.csv");
    write_manifest(manifest, a.out_dir, true);
    if (g_opts.manifest_only) {
        return;
    }
    const auto model = gms::regression::load_model(a.model);
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    gms::SuiteMatrix suite;
    const gms::SuiteMatrix* suite_ptr = nullptr;
    if (!a.suite.empty()) {
        suite = gms::load_suite(a.suite);
        suite_ptr = &suite;
    }
    gms::pipeline::ValidationOptions opts;
    opts.n_samples = a.n;
    opts.seed = g_opts.seed;
    opts.workers = g_opts.workers;
    opts.repeats = a.repeats;
    gms::pipeline::ValidationReport report =
        gms::pipeline::validate_generated(*model, basis, tmpl, suite_ptr, opts);
    report.provenance["model_sha256"] = gms::io::sha256_file(a.model);
    write_validation_outputs(report, a.out_dir);
}

void run_validate_record(const ValidateArgs& a) {
    const gms::pipeline::MaterialTemplate tmpl =
        gms::pipeline::MaterialTemplate::from_json(load_config_json(a.tmpl));
    json manifest = manifest_base("validate record");
    manifest_input(manifest, "model", a.model);
    manifest_input(manifest, "basis", a.basis);
    manifest_input(manifest, "template", a.tmpl);
    manifest_input(manifest, "record", a.record);
    manifest["options"] = {{"n", a.n},
                           {"repeats", a.repeats},
                           {"truth_from_reconstruction", a.truth_from_reconstruction}};
    manifest_output(manifest, fs::path(a.out_dir) / "report.json");
    manifest_output(manifest, fs::path(a.out_dir) / "errors.csv");
    write_manifest(manifest, a.out_dir, true);
    if (g_opts.manifest_only) {
        return;
    }
    const auto model = gms::regression::load_model(a.model);
    const gms::SpectralBasis basis = gms::load_basis(a.basis);
    const gms::GroundMotionRecord record = gms::load_record(a.record);
    gms::pipeline::ValidationOptions opts;
    opts.n_samples = a.n;
    opts.seed = g_opts.seed;
    opts.workers = g_opts.workers;
    opts.repeats = a.repeats;
    opts.truth_from_reconstruction = a.truth_from_reconstruction;
    gms::pipeline::RecordValidation result =
        gms::pipeline::validate_record(*model, basis, record, tmpl, opts);
    result.report.provenance["model_sha256"] = gms::io::sha256_file(a.model);
    std::cout << "reconstruction rel L2 " << result.reconstruction_rel_l2 << ", IM deltas: PGA "
              << result.pga_delta_pct << "%, Arias " << result.arias_delta_pct << "%, lambda1 "
              << result.lambda1_delta_pct << "%\n";
    write_validation_outputs(result.report, a.out_dir);
}

// -------------------------------------------------------------------- im --

struct ImArgs {
    std::string record;
    std::string suite;
    std::string out;
};

void run_im(const ImArgs& a) {
    if (a.record.empty() == a.suite.empty()) {
        throw gms::ConfigError("pass exactly one of --record or --suite");
    }
    json manifest = manifest_base("im");
    if (!a.record.empty()) {
        manifest_input(manifest, "record", a.record);
    } else {
        manifest_input(manifest, "suite", a.suite);
    }
    manifest_output(manifest, a.out);
    write_manifest(manifest, a.out, false);
    if (g_opts.manifest_only) {
        return;
    }
    std::vector<gms::IMReport> rows;
    if (!a.record.empty()) {
        rows.push_back(gms::im_report(gms::load_record(a.record)));
    } else {
        rows = gms::im_table(gms::load_suite(a.suite));
    }
    json out = json::array();
    for (const gms::IMReport& r : rows) {
        out.push_back({{"record_id", r.record_id},
                       {"pga_g", r.pga},
                       {"arias_m_per_s", r.arias},
                       {"lambda1", r.lambda1}});
    }
    gms::io::write_json_file(a.out, json{{"records", out}});
    std::cout << "intensity measures for " << rows.size() << " record(s) -> " << a.out << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground-motion surrogate toolkit: suite ingest, spectral basis, nonlinear "
                 "response simulation, dataset generation, model training and validation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    app.fallthrough();

    auto* seed_opt =
        app.add_option("--seed", g_opts.seed, "Master seed for every random draw")->capture_default_str();
    seed_opt->each([](const std::string&) { g_opts.seed_given = true; });
    app.add_option("--workers", g_opts.workers,
                   "Worker threads (0 = hardware concurrency); results never depend on this")
        ->capture_default_str();
    app.add_option("--log-file", g_opts.log_file, "Where errors are logged")->capture_default_str();
    app.add_flag("--manifest-only", g_opts.manifest_only,
                 "Validate configuration, write the run manifest, do no work");

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Build a suite from records (or synthesize one)");
    c_ingest->add_option("files", ingest.files, "Record files (.at2 or .csv)");
    c_ingest->add_option("--list", ingest.list_file, "File with one record path per line");
    c_ingest->add_option("--synthetic", ingest.synthetic, "Generate N synthetic records instead");
    c_ingest->add_option("--dt", ingest.dt, "Common grid spacing [s]")->capture_default_str();
    c_ingest->add_option("--duration", ingest.duration, "Common duration [s] (default: longest record)");
    c_ingest->add_option("--out", ingest.out, "Output suite file")->required();
    c_ingest->callback([&]() { run_ingest(ingest); });

    auto* c_basis = app.add_subcommand("basis", "Spectral basis operations");
    c_basis->require_subcommand(1);

    BasisBuildArgs bbuild;
    auto* c_bb = c_basis->add_subcommand("build", "Decompose a suite into an orthonormal basis");
    c_bb->add_option("--suite", bbuild.suite, "Input suite")->required();
    c_bb->add_option("--out", bbuild.out, "Output basis file")->required();
    c_bb->add_option("--rank", bbuild.rank, "Keep exactly this many directions");
    c_bb->add_option("--tau", bbuild.tau, "Keep directions until this explained-variance share");
    c_bb->callback([&]() { run_basis_build(bbuild); });

    BasisProjectArgs bproj;
    auto* c_bp = c_basis->add_subcommand("project", "Project a record onto basis weights");
    c_bp->add_option("--basis", bproj.basis, "Basis file")->required();
    c_bp->add_option("--record", bproj.record, "Record to project")->required();
    c_bp->add_option("--out", bproj.out, "Output weights JSON")->required();
    c_bp->callback([&]() { run_basis_project(bproj); });

    BasisReconstructArgs brec;
    auto* c_br = c_basis->add_subcommand("reconstruct", "Rebuild a motion from weights");
    c_br->add_option("--basis", brec.basis, "Basis file")->required();
    c_br->add_option("--weights", brec.weights, "Weights JSON (from basis project)");
    c_br->add_option("--record", brec.record, "Project this record first, then reconstruct");
    c_br->add_option("--out", brec.out, "Output record CSV")->required();
    c_br->callback([&]() { run_basis_reconstruct(brec); });

    BasisSampleArgs bsamp;
    auto* c_bs = c_basis->add_subcommand("sample", "Draw weight vectors inside the suite bounds");
    c_bs->add_option("--basis", bsamp.basis, "Basis file")->required();
    c_bs->add_option("--count", bsamp.count, "How many samples")->capture_default_str();
    c_bs->add_option("--out", bsamp.out, "Output JSON")->required();
    c_bs->add_option("--motions-dir", bsamp.motions_dir, "Also write reconstructed motions here");
    c_bs->callback([&]() { run_basis_sample(bsamp); });

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Nonlinear time-history analysis of one record");
    c_sim->add_option("--record", sim.record, "Ground motion record")->required();
    c_sim->add_option("--stories", sim.stories, "Story parameter JSON")->required();
    c_sim->add_option("--out", sim.out, "Response CSV (or EDP JSON with --edp-only)");
    c_sim->add_flag("--edp-only", sim.edp_only, "Emit peak EDPs as JSON instead of the history");
    c_sim->callback([&]() { run_simulate(sim); });

    auto* c_data = app.add_subcommand("dataset", "Dataset generation and splitting");
    c_data->require_subcommand(1);

    DatasetGenerateArgs dgen;
    auto* c_dg = c_data->add_subcommand("generate", "Monte Carlo dataset from a basis");
    c_dg->add_option("--basis", dgen.basis, "Basis file")->required();
    c_dg->add_option("--config", dgen.config, "Generation config JSON")->required();
    c_dg->add_option("--out", dgen.out, "Output dataset file")->required();
    c_dg->callback([&]() { run_dataset_generate(dgen); });

    DatasetSplitArgs dsplit;
    auto* c_ds = c_data->add_subcommand("split", "Train/test split");
    c_ds->add_option("--data", dsplit.data, "Dataset file")->required();
    c_ds->add_option("--test-fraction", dsplit.test_fraction, "Held-out share")
        ->capture_default_str();
    c_ds->add_option("--out", dsplit.out, "Output dataset (default: rewrite input)");
    c_ds->callback([&]() { run_dataset_split(dsplit); });

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Fit one model kind");
    c_train->add_option("--data", train.data, "Dataset file")->required();
    c_train->add_option("--kind", train.kind, "dt, rf, svr, or dnn")->required();
    c_train->add_option("--hyper", train.hyper, "Hyperparameter JSON file");
    c_train->add_option("--grid", train.grid, "Candidate grid JSON array (enables CV)");
    c_train->add_option("--folds", train.folds, "CV folds")->capture_default_str();
    c_train->add_option("--out", train.out, "Output model file")->required();
    c_train->callback([&]() { run_train(train); });

    LeaderboardArgs board;
    auto* c_board = app.add_subcommand("leaderboard", "CV, train, and rank all four model kinds");
    c_board->add_option("--data", board.data, "Dataset file")->required();
    c_board->add_option("--grids", board.grids, "JSON object: kind -> candidate(s)")->required();
    c_board->add_option("--out", board.out_dir, "Output directory")->required();
    c_board->add_option("--folds", board.folds, "CV folds")->capture_default_str();
    c_board->callback([&]() { run_leaderboard(board); });

    ValidateArgs val;
    auto* c_val = app.add_subcommand("validate", "Surrogate validation protocols");
    c_val->require_subcommand(1);
    auto* c_vg = c_val->add_subcommand("generated", "Fresh random draws vs simulation");
    c_vg->add_option("--model", val.model, "Trained model")->required();
    c_vg->add_option("--basis", val.basis, "Basis file")->required();
    c_vg->add_option("--template", val.tmpl, "Material template JSON")->required();
    c_vg->add_option("--suite", val.suite, "Suite for the intensity-measure comparison");
    c_vg->add_option("-n,--samples", val.n, "Draws per repeat")->capture_default_str();
    c_vg->add_option("--repeats", val.repeats, "Protocol repetitions")->capture_default_str();
    c_vg->add_option("--out", val.out_dir, "Output directory")->required();
    c_vg->callback([&]() { run_validate_generated(val); });

    auto* c_vr = c_val->add_subcommand("record", "Fixed record, varying structure");
    c_vr->add_option("--model", val.model, "Trained model")->required();
    c_vr->add_option("--basis", val.basis, "Basis file")->required();
    c_vr->add_option("--record", val.record, "The record under study")->required();
    c_vr->add_option("--template", val.tmpl, "Material template JSON")->required();
    c_vr->add_option("-n,--samples", val.n, "Material draws per repeat")->capture_default_str();
    c_vr->add_option("--repeats", val.repeats, "Protocol repetitions")->capture_default_str();
    c_vr->add_flag("--truth-from-reconstruction", val.truth_from_reconstruction,
                   "Ablation: simulate ground truth with the reconstructed motion");
    c_vr->add_option("--out", val.out_dir, "Output directory")->required();
    c_vr->callback([&]() { run_validate_record(val); });

    ImArgs im;
    auto* c_im = app.add_subcommand("im", "Intensity measures of a record or suite");
    c_im->add_option("--record", im.record, "Single record");
    c_im->add_option("--suite", im.suite, "Whole suite");
    c_im->add_option("--out", im.out, "Output JSON")->required();
    c_im->callback([&]() { run_im(im); });

    for (int i = 0; i < argc; ++i) {
        g_opts.argv_echo.push_back(argv[i]);
    }

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const gms::ConfigError& e) {
        std::string cmd;
        for (const std::string& arg : g_opts.argv_echo) {
            cmd += (cmd.empty() ? "" : " ") + arg;
        }
        log_line("command: " + cmd);
        log_line("error (config): " + std::string(e.what()));
        std::cerr << "error: " << e.what() << " (details: " << g_opts.log_file.string() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::string cmd;
        for (const std::string& arg : g_opts.argv_echo) {
            cmd += (cmd.empty() ? "" : " ") + arg;
        }
        log_line("command: " + cmd);
        log_line("error: " + std::string(e.what()));
        std::cerr << "error: " << e.what() << " (details: " << g_opts.log_file.string() << ")\n";
        return 3;
    }
}
