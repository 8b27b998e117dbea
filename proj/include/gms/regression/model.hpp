#pragma once

#include "gms/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms::regression {

enum class Kind : std::uint32_t {
    DecisionTree = 1,
    RandomForest = 2,
    Svr = 3,
    Dnn = 4,
};

std::string kind_name(Kind kind);
Kind kind_from_name(const std::string& name);

/// Per-column mean/std pairs fitted on the train split. Columns with zero
/// spread get std = 1 so standardization stays invertible.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;

    void fit(const linalg::Matrix& data, const std::vector<std::size_t>& rows);
    double standardize(double v, std::size_t col) const {
        return (v - mean[col]) / stdev[col];
    }
    double destandardize(double v, std::size_t col) const {
        return v * stdev[col] + mean[col];
    }
};

/// Common surface of the four surrogate kinds. Prediction maps raw features
/// to raw (destandardized) targets; whether standardization happens inside
/// is the concrete model's business (trees are split-invariant under it, so
/// they work on raw values; SVR and the network standardize). Models are
/// immutable after fitting; predict is const and reentrant.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual Kind kind() const = 0;
    /// x: n x input_dim raw features; returns n x 2 raw predictions.
    virtual linalg::Matrix predict(const linalg::Matrix& x) const = 0;
    virtual nlohmann::json hyperparameters() const = 0;
    /// Convergence flags and other fit-time facts for the model sidecar.
    virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }

    std::size_t input_dim() const { return input_dim_; }
    const Standardizer& x_stats() const { return x_stats_; }
    const Standardizer& y_stats() const { return y_stats_; }

    /// Kind-specific parameter blob, bit-exact round trip.
    virtual void write_blob(std::ostream& out) const = 0;
    virtual std::uint32_t blob_version() const { return 1; }

protected:
    void check_input(const linalg::Matrix& x) const;

    std::size_t input_dim_ = 0;
    Standardizer x_stats_;
    Standardizer y_stats_;

    friend void save_model(const Regressor&, const std::filesystem::path&,
                           const nlohmann::json&);
    friend std::unique_ptr<Regressor> load_model(const std::filesystem::path&);
};

/// Fit a model of the given kind on the selected rows. `hyper` uses the same
/// JSON schema the CLI accepts; unknown keys are rejected. `dnn_monitor`
/// optionally names rows whose loss drives the network's early stopping
/// (defaults to an internal carve-out of the training rows).
std::unique_ptr<Regressor> fit(Kind kind, const linalg::Matrix& x, const linalg::Matrix& y,
                               const std::vector<std::size_t>& rows,
                               const nlohmann::json& hyper, std::uint64_t seed,
                               const std::vector<std::size_t>& dnn_monitor = {});

/// "QMODEL01" file: magic, kind tag, blob version, standardization stats,
/// kind blob; JSON sidecar at <path>.json with hyperparameters, stats,
/// diagnostics, and whatever the caller adds (train metrics, dataset hash).
void save_model(const Regressor& model, const std::filesystem::path& path,
                const nlohmann::json& sidecar_extra = nlohmann::json::object());
std::unique_ptr<Regressor> load_model(const std::filesystem::path& path);

/// Predict on a row subset (convenience used by metrics/evaluation).
linalg::Matrix predict_rows(const Regressor& model, const linalg::Matrix& x,
                            const std::vector<std::size_t>& rows);

/// Gather Y rows into a dense matrix (paired with predict_rows for scoring).
linalg::Matrix gather_rows(const linalg::Matrix& m, const std::vector<std::size_t>& rows);

} // namespace gms::regression
