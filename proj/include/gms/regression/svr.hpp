#pragma once

#include "gms/regression/model.hpp"

#include <cstdint>

namespace gms::regression {

struct SvrConfig {
    double c = 1.5;            // box constraint (the regularization knob)
    double epsilon = 0.5;      // insensitive-tube half width, standardized units
    double gamma = 0.0;        // RBF width; <= 0 means 1/d after standardization
    int max_train = 5000;      // training rows are subsampled to this cap
    int max_iterations = 300000;
    double kkt_tol = 1e-3;
};

/// Epsilon-insensitive SVR with an RBF kernel, one machine per target,
/// trained by SMO (maximal-violating-pair working set) on the standardized
/// inputs and targets. Training cost is quadratic in rows, so fitting
/// subsamples to `max_train` rows using the run seed. Hitting the iteration
/// cap is reported through diagnostics(), not thrown: the attained duals
/// still define a usable model.
class SvrModel final : public Regressor {
public:
    SvrModel(const linalg::Matrix& x, const linalg::Matrix& y,
             const std::vector<std::size_t>& rows, const SvrConfig& config,
             std::uint64_t seed);

    struct TargetMachine {
        std::vector<double> beta; // alpha - alpha*, one per support vector
        linalg::Matrix sv;        // support vectors, standardized, one per row
        double bias = 0.0;
        bool converged = true;
        int iterations = 0;
        // Full duals kept for inspection (not serialized).
        std::vector<double> alpha;
        std::vector<double> alpha_star;
    };

    SvrModel(SvrConfig config, double gamma_used, std::vector<TargetMachine> machines);

    Kind kind() const override { return Kind::Svr; }
    linalg::Matrix predict(const linalg::Matrix& x) const override;
    nlohmann::json hyperparameters() const override;
    nlohmann::json diagnostics() const override;
    void write_blob(std::ostream& out) const override;

    const TargetMachine& machine(std::size_t t) const { return machines_[t]; }
    double gamma_used() const { return gamma_used_; }

private:
    SvrConfig config_;
    double gamma_used_ = 0.0;
    std::vector<TargetMachine> machines_;
};

} // namespace gms::regression
