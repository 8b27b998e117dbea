#pragma once

#include "gms/regression/model.hpp"
#include "gms/rng.hpp"

#include <cstdint>

namespace gms::regression {

struct DnnConfig {
    int hidden_layers = 3;
    int width = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int batch_size = 256;
    int max_epochs = 500;
    double min_delta = 1e-5; // minimum monitored-loss improvement
    int patience = 20;       // epochs without improvement before stopping
    double holdout_fraction = 0.1; // used when no explicit monitor rows
};

/// Plain fully-connected network: `hidden_layers` ReLU layers of `width`
/// units and a linear output head. Parameters live in one flat vector so
/// the optimizer and the finite-difference gradient check can treat the
/// model generically. All buffers are preallocated; training is
/// single-threaded and bit-deterministic for a given seed.
class Mlp {
public:
    Mlp(std::size_t input_dim, std::size_t output_dim, int hidden_layers, int width);

    void init_he_uniform(rng::Stream& stream);

    std::size_t parameter_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& grads() const { return grads_; }

    /// Mean-squared-error loss of a batch (mean over batch*outputs), with
    /// backpropagated gradients accumulated into grads().
    double loss_and_gradients(const std::vector<double>& x, const std::vector<double>& y,
                              std::size_t batch);
    /// Loss only (used by evaluation and the finite-difference oracle).
    double loss(const std::vector<double>& x, const std::vector<double>& y,
                std::size_t batch) const;
    /// Forward pass; out must hold batch*output_dim.
    void forward(const std::vector<double>& x, std::size_t batch, std::vector<double>& out) const;

    /// Smallest |pre-activation| across hidden units of a batch. The
    /// finite-difference check uses it to stay away from ReLU kinks.
    double min_abs_preactivation(const std::vector<double>& x, std::size_t batch) const;

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    int hidden_layers() const { return hidden_layers_; }
    int width() const { return width_; }

private:
    struct LayerShape {
        std::size_t in;
        std::size_t out;
        std::size_t w_offset; // into params_
        std::size_t b_offset;
    };

    void forward_internal(const std::vector<double>& x, std::size_t batch,
                          std::vector<std::vector<double>>& pre,
                          std::vector<std::vector<double>>& act) const;

    std::size_t input_dim_;
    std::size_t output_dim_;
    int hidden_layers_;
    int width_;
    std::vector<LayerShape> shapes_;
    std::vector<double> params_;
    std::vector<double> grads_;
};

class DnnModel final : public Regressor {
public:
    /// monitor_rows: rows of (x, y) whose loss drives early stopping. Empty
    /// means an internal holdout is carved from the training rows.
    DnnModel(const linalg::Matrix& x, const linalg::Matrix& y,
             const std::vector<std::size_t>& train_rows,
             const std::vector<std::size_t>& monitor_rows, const DnnConfig& config,
             std::uint64_t seed);
    DnnModel(DnnConfig config, Mlp net, nlohmann::json training_log);

    Kind kind() const override { return Kind::Dnn; }
    linalg::Matrix predict(const linalg::Matrix& x) const override;
    nlohmann::json hyperparameters() const override;
    nlohmann::json diagnostics() const override;
    void write_blob(std::ostream& out) const override;

    const Mlp& net() const { return net_; }

private:
    DnnConfig config_;
    Mlp net_;
    nlohmann::json training_log_;
};

} // namespace gms::regression
