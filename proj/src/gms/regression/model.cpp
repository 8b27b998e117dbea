#include "gms/regression/model.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/regression/dnn.hpp"
#include "gms/regression/forest.hpp"
#include "gms/regression/svr.hpp"
#include "gms/regression/tree.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gms::regression {

std::string kind_name(Kind kind) {
    switch (kind) {
    case Kind::DecisionTree:
        return "dt";
    case Kind::RandomForest:
        return "rf";
    case Kind::Svr:
        return "svr";
    case Kind::Dnn:
        return "dnn";
    }
    throw Error("unknown model kind");
}

Kind kind_from_name(const std::string& name) {
    if (name == "dt") {
        return Kind::DecisionTree;
    }
    if (name == "rf") {
        return Kind::RandomForest;
    }
    if (name == "svr") {
        return Kind::Svr;
    }
    if (name == "dnn") {
        return Kind::Dnn;
    }
    throw ConfigError("unknown model kind '" + name + "' (expected dt, rf, svr, or dnn)");
}

void Standardizer::fit(const linalg::Matrix& data, const std::vector<std::size_t>& rows) {
    if (rows.empty()) {
        throw Error("Standardizer: no rows");
    }
    const std::size_t d = data.cols();
    mean.assign(d, 0.0);
    stdev.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t r : rows) {
            s += data(r, j);
        }
        mean[j] = s / static_cast<double>(rows.size());
        double q = 0.0;
        for (std::size_t r : rows) {
            const double diff = data(r, j) - mean[j];
            q += diff * diff;
        }
        const double var = q / static_cast<double>(rows.size());
        // Constant columns standardize to zero; std 1 keeps the map invertible.
        stdev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

void Regressor::check_input(const linalg::Matrix& x) const {
    if (x.cols() != input_dim_) {
        throw Error("predict: input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(input_dim_));
    }
}

namespace {

void reject_unknown_keys(const nlohmann::json& hyper, const std::set<std::string>& allowed,
                         const std::string& kind) {
    if (!hyper.is_object()) {
        throw ConfigError(kind + " hyperparameters must be a JSON object");
    }
    for (const auto& [key, value] : hyper.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw ConfigError(kind + " hyperparameters: unknown key '" + key + "'");
        }
    }
}

int parse_depth(const nlohmann::json& v) {
    // null or -1 both mean "unbounded".
    if (v.is_null()) {
        return -1;
    }
    if (!v.is_number_integer()) {
        throw ConfigError("max_depth must be an integer or null");
    }
    return v.get<int>();
}

DtConfig parse_dt_config(const nlohmann::json& hyper) {
    reject_unknown_keys(hyper, {"max_depth"}, "dt");
    DtConfig c;
    if (hyper.contains("max_depth")) {
        c.max_depth = parse_depth(hyper.at("max_depth"));
    }
    return c;
}

RfConfig parse_rf_config(const nlohmann::json& hyper) {
    reject_unknown_keys(hyper, {"n_trees", "bootstrap", "max_depth"}, "rf");
    RfConfig c;
    try {
        c.n_trees = hyper.value("n_trees", c.n_trees);
        c.bootstrap = hyper.value("bootstrap", c.bootstrap);
        if (hyper.contains("max_depth")) {
            c.max_depth = parse_depth(hyper.at("max_depth"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("rf hyperparameters: ") + e.what());
    }
    return c;
}

SvrConfig parse_svr_config(const nlohmann::json& hyper) {
    reject_unknown_keys(hyper, {"C", "epsilon", "gamma", "max_train", "max_iterations", "kkt_tol"},
                        "svr");
    SvrConfig c;
    try {
        c.c = hyper.value("C", c.c);
        c.epsilon = hyper.value("epsilon", c.epsilon);
        if (hyper.contains("gamma")) {
            const auto& g = hyper.at("gamma");
            if (g.is_string()) {
                if (g.get<std::string>() != "auto") {
                    throw ConfigError("svr gamma must be a number or \"auto\"");
                }
                c.gamma = 0.0;
            } else {
                c.gamma = g.get<double>();
            }
        }
        c.max_train = hyper.value("max_train", c.max_train);
        c.max_iterations = hyper.value("max_iterations", c.max_iterations);
        c.kkt_tol = hyper.value("kkt_tol", c.kkt_tol);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("svr hyperparameters: ") + e.what());
    }
    return c;
}

DnnConfig parse_dnn_config(const nlohmann::json& hyper) {
    reject_unknown_keys(hyper,
                        {"hidden_layers", "width", "learning_rate", "beta1", "beta2", "batch_size",
                         "max_epochs", "min_delta", "patience", "holdout_fraction"},
                        "dnn");
    DnnConfig c;
    try {
        c.hidden_layers = hyper.value("hidden_layers", c.hidden_layers);
        c.width = hyper.value("width", c.width);
        c.learning_rate = hyper.value("learning_rate", c.learning_rate);
        c.beta1 = hyper.value("beta1", c.beta1);
        c.beta2 = hyper.value("beta2", c.beta2);
        c.batch_size = hyper.value("batch_size", c.batch_size);
        c.max_epochs = hyper.value("max_epochs", c.max_epochs);
        c.min_delta = hyper.value("min_delta", c.min_delta);
        c.patience = hyper.value("patience", c.patience);
        c.holdout_fraction = hyper.value("holdout_fraction", c.holdout_fraction);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("dnn hyperparameters: ") + e.what());
    }
    return c;
}

} // namespace

std::unique_ptr<Regressor> fit(Kind kind, const linalg::Matrix& x, const linalg::Matrix& y,
                               const std::vector<std::size_t>& rows,
                               const nlohmann::json& hyper, std::uint64_t seed,
                               const std::vector<std::size_t>& dnn_monitor) {
    switch (kind) {
    case Kind::DecisionTree:
        return std::make_unique<DecisionTreeModel>(x, y, rows, parse_dt_config(hyper));
    case Kind::RandomForest:
        return std::make_unique<RandomForestModel>(x, y, rows, parse_rf_config(hyper), seed,
                                                   /*workers=*/0);
    case Kind::Svr:
        return std::make_unique<SvrModel>(x, y, rows, parse_svr_config(hyper), seed);
    case Kind::Dnn:
        return std::make_unique<DnnModel>(x, y, rows, dnn_monitor, parse_dnn_config(hyper), seed);
    }
    throw Error("unknown model kind");
}

namespace {

constexpr char kModelMagic[8] = {'Q', 'M', 'O', 'D', 'E', 'L', '0', '1'};

void write_stats(std::ostream& out, const Standardizer& s) {
    io::write_u32(out, static_cast<std::uint32_t>(s.mean.size()));
    io::write_f64_array(out, s.mean.data(), s.mean.size());
    io::write_f64_array(out, s.stdev.data(), s.stdev.size());
}

Standardizer read_stats(std::istream& in) {
    Standardizer s;
    const std::size_t d = io::read_u32(in);
    s.mean.resize(d);
    s.stdev.resize(d);
    io::read_f64_array(in, s.mean.data(), d);
    io::read_f64_array(in, s.stdev.data(), d);
    return s;
}

nlohmann::json stats_json(const Standardizer& s) {
    return {{"mean", s.mean}, {"std", s.stdev}};
}

std::unique_ptr<Regressor> read_dt_blob(std::istream& in) {
    DtConfig config;
    config.max_depth = static_cast<std::int32_t>(io::read_u32(in));
    const std::size_t n_trees = io::read_u32(in);
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        trees.push_back(read_tree(in));
    }
    return std::make_unique<DecisionTreeModel>(config, std::move(trees));
}

std::unique_ptr<Regressor> read_rf_blob(std::istream& in) {
    RfConfig config;
    config.n_trees = static_cast<std::int32_t>(io::read_u32(in));
    config.bootstrap = io::read_u32(in) != 0;
    config.max_depth = static_cast<std::int32_t>(io::read_u32(in));
    const std::size_t n_targets = io::read_u32(in);
    const std::size_t n_total = io::read_u32(in);
    std::vector<Tree> trees;
    trees.reserve(n_total);
    for (std::size_t t = 0; t < n_total; ++t) {
        trees.push_back(read_tree(in));
    }
    return std::make_unique<RandomForestModel>(config, n_targets, std::move(trees));
}

std::unique_ptr<Regressor> read_svr_blob(std::istream& in) {
    SvrConfig config;
    config.c = io::read_f64(in);
    config.epsilon = io::read_f64(in);
    const double gamma_used = io::read_f64(in);
    config.gamma = io::read_f64(in);
    config.max_train = static_cast<std::int32_t>(io::read_u32(in));
    config.max_iterations = static_cast<std::int32_t>(io::read_u32(in));
    config.kkt_tol = io::read_f64(in);
    const std::size_t n_machines = io::read_u32(in);
    std::vector<SvrModel::TargetMachine> machines(n_machines);
    for (auto& m : machines) {
        const std::size_t n_sv = io::read_u32(in);
        const std::size_t d = io::read_u32(in);
        m.bias = io::read_f64(in);
        m.converged = io::read_u32(in) != 0;
        m.iterations = static_cast<std::int32_t>(io::read_u32(in));
        m.beta.resize(n_sv);
        for (double& b : m.beta) {
            b = io::read_f64(in);
        }
        m.sv = linalg::Matrix(n_sv, d);
        io::read_f64_array(in, m.sv.data().data(), m.sv.data().size());
    }
    return std::make_unique<SvrModel>(config, gamma_used, std::move(machines));
}

std::unique_ptr<Regressor> read_dnn_blob(std::istream& in) {
    DnnConfig config;
    config.hidden_layers = static_cast<std::int32_t>(io::read_u32(in));
    config.width = static_cast<std::int32_t>(io::read_u32(in));
    config.learning_rate = io::read_f64(in);
    config.beta1 = io::read_f64(in);
    config.beta2 = io::read_f64(in);
    config.batch_size = static_cast<std::int32_t>(io::read_u32(in));
    config.max_epochs = static_cast<std::int32_t>(io::read_u32(in));
    config.min_delta = io::read_f64(in);
    config.patience = static_cast<std::int32_t>(io::read_u32(in));
    config.holdout_fraction = io::read_f64(in);
    const std::size_t input_dim = io::read_u32(in);
    const std::size_t output_dim = io::read_u32(in);
    const std::size_t n_params = io::read_u32(in);
    Mlp net(input_dim, output_dim, config.hidden_layers, config.width);
    if (net.parameter_count() != n_params) {
        throw IoError("dnn blob parameter count does not match the architecture");
    }
    io::read_f64_array(in, net.params().data(), n_params);
    return std::make_unique<DnnModel>(config, std::move(net),
                                      nlohmann::json{{"loaded_from_file", true}});
}

} // namespace

void save_model(const Regressor& model, const std::filesystem::path& path,
                const nlohmann::json& sidecar_extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write model file: " + path.string());
    }
    out.write(kModelMagic, sizeof(kModelMagic));
    io::write_u32(out, static_cast<std::uint32_t>(model.kind()));
    io::write_u32(out, model.blob_version());
    io::write_u32(out, static_cast<std::uint32_t>(model.input_dim()));
    write_stats(out, model.x_stats());
    write_stats(out, model.y_stats());
    model.write_blob(out);
    out.close();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }

    nlohmann::json sidecar;
    sidecar["format"] = "QMODEL01";
    sidecar["kind"] = kind_name(model.kind());
    sidecar["blob_version"] = model.blob_version();
    sidecar["input_dim"] = model.input_dim();
    sidecar["hyperparameters"] = model.hyperparameters();
    sidecar["standardization"] = {{"x", stats_json(model.x_stats())},
                                  {"y", stats_json(model.y_stats())}};
    sidecar["diagnostics"] = model.diagnostics();
    sidecar["sha256"] = io::sha256_file(path);
    for (const auto& [key, value] : sidecar_extra.items()) {
        sidecar[key] = value;
    }
    io::write_json_file(path.string() + ".json", sidecar);
}

std::unique_ptr<Regressor> load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file: " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kModelMagic)) {
        throw IoError("not a QMODEL01 file: " + path.string());
    }
    const std::uint32_t kind_tag = io::read_u32(in);
    const std::uint32_t version = io::read_u32(in);
    if (version != 1) {
        throw IoError("unsupported model blob version " + std::to_string(version));
    }
    const std::size_t input_dim = io::read_u32(in);
    Standardizer x_stats = read_stats(in);
    Standardizer y_stats = read_stats(in);

    std::unique_ptr<Regressor> model;
    switch (static_cast<Kind>(kind_tag)) {
    case Kind::DecisionTree:
        model = read_dt_blob(in);
        break;
    case Kind::RandomForest:
        model = read_rf_blob(in);
        break;
    case Kind::Svr:
        model = read_svr_blob(in);
        break;
    case Kind::Dnn:
        model = read_dnn_blob(in);
        break;
    default:
        throw IoError("unknown model kind tag " + std::to_string(kind_tag));
    }
    model->input_dim_ = input_dim;
    model->x_stats_ = std::move(x_stats);
    model->y_stats_ = std::move(y_stats);
    return model;
}

linalg::Matrix gather_rows(const linalg::Matrix& m, const std::vector<std::size_t>& rows) {
    linalg::Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(rows[i], j);
        }
    }
    return out;
}

linalg::Matrix predict_rows(const Regressor& model, const linalg::Matrix& x,
                            const std::vector<std::size_t>& rows) {
    return model.predict(gather_rows(x, rows));
}

} // namespace gms::regression
