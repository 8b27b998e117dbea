#include "gms/regression/dnn.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace gms::regression {

Mlp::Mlp(std::size_t input_dim, std::size_t output_dim, int hidden_layers, int width)
    : input_dim_(input_dim), output_dim_(output_dim), hidden_layers_(hidden_layers),
      width_(width) {
    if (input_dim == 0 || output_dim == 0 || hidden_layers < 0 || (hidden_layers > 0 && width < 1)) {
        throw Error("Mlp: invalid architecture");
    }
    std::size_t offset = 0;
    std::size_t in = input_dim;
    for (int l = 0; l < hidden_layers; ++l) {
        const std::size_t out = static_cast<std::size_t>(width);
        shapes_.push_back({in, out, offset, offset + in * out});
        offset += in * out + out;
        in = out;
    }
    shapes_.push_back({in, output_dim, offset, offset + in * output_dim});
    offset += in * output_dim + output_dim;
    params_.assign(offset, 0.0);
    grads_.assign(offset, 0.0);
}

void Mlp::init_he_uniform(rng::Stream& stream) {
    for (const LayerShape& s : shapes_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(s.in));
        for (std::size_t i = 0; i < s.in * s.out; ++i) {
            params_[s.w_offset + i] = stream.uniform(-limit, limit);
        }
        for (std::size_t i = 0; i < s.out; ++i) {
            params_[s.b_offset + i] = 0.0;
        }
    }
}

void Mlp::forward_internal(const std::vector<double>& x, std::size_t batch,
                           std::vector<std::vector<double>>& pre,
                           std::vector<std::vector<double>>& act) const {
    pre.resize(shapes_.size());
    act.resize(shapes_.size());
    const double* input = x.data();
    std::size_t in_dim = input_dim_;
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
        const LayerShape& s = shapes_[l];
        pre[l].assign(batch * s.out, 0.0);
        const double* w = params_.data() + s.w_offset;
        const double* b = params_.data() + s.b_offset;
        for (std::size_t r = 0; r < batch; ++r) {
            const double* xi = input + r * in_dim;
            double* zi = pre[l].data() + r * s.out;
            for (std::size_t o = 0; o < s.out; ++o) {
                const double* wo = w + o * s.in;
                double acc = b[o];
                for (std::size_t i = 0; i < s.in; ++i) {
                    acc += wo[i] * xi[i];
                }
                zi[o] = acc;
            }
        }
        const bool is_head = l + 1 == shapes_.size();
        if (is_head) {
            act[l] = pre[l];
        } else {
            act[l].resize(pre[l].size());
            for (std::size_t i = 0; i < pre[l].size(); ++i) {
                act[l][i] = pre[l][i] > 0.0 ? pre[l][i] : 0.0;
            }
        }
        input = act[l].data();
        in_dim = s.out;
    }
}

void Mlp::forward(const std::vector<double>& x, std::size_t batch,
                  std::vector<double>& out) const {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
    forward_internal(x, batch, pre, act);
    out = act.back();
}

double Mlp::loss(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t batch) const {
    std::vector<double> out;
    forward(x, batch, out);
    double acc = 0.0;
    for (std::size_t i = 0; i < batch * output_dim_; ++i) {
        const double e = out[i] - y[i];
        acc += e * e;
    }
    return acc / static_cast<double>(batch * output_dim_);
}

double Mlp::min_abs_preactivation(const std::vector<double>& x, std::size_t batch) const {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
    forward_internal(x, batch, pre, act);
    double min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l + 1 < shapes_.size(); ++l) { // hidden layers only
        for (double z : pre[l]) {
            min_abs = std::min(min_abs, std::abs(z));
        }
    }
    return min_abs;
}

double Mlp::loss_and_gradients(const std::vector<double>& x, const std::vector<double>& y,
                               std::size_t batch) {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
    forward_internal(x, batch, pre, act);
    std::fill(grads_.begin(), grads_.end(), 0.0);

    const std::size_t n_layers = shapes_.size();
    const std::vector<double>& out = act.back();
    double loss_acc = 0.0;
    // dL/d(out) for MSE averaged over batch*outputs.
    std::vector<double> delta(batch * output_dim_);
    const double scale = 2.0 / static_cast<double>(batch * output_dim_);
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double e = out[i] - y[i];
        loss_acc += e * e;
        delta[i] = scale * e;
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerShape& s = shapes_[l];
        const double* below = l == 0 ? x.data() : act[l - 1].data();
        double* gw = grads_.data() + s.w_offset;
        double* gb = grads_.data() + s.b_offset;
        std::vector<double> delta_below;
        if (l > 0) {
            delta_below.assign(batch * s.in, 0.0);
        }
        const double* w = params_.data() + s.w_offset;
        for (std::size_t r = 0; r < batch; ++r) {
            const double* d = delta.data() + r * s.out;
            const double* a = below + r * s.in;
            double* db = l > 0 ? delta_below.data() + r * s.in : nullptr;
            for (std::size_t o = 0; o < s.out; ++o) {
                const double dout = d[o];
                if (dout == 0.0) {
                    continue;
                }
                gb[o] += dout;
                double* gwo = gw + o * s.in;
                const double* wo = w + o * s.in;
                for (std::size_t i = 0; i < s.in; ++i) {
                    gwo[i] += dout * a[i];
                    if (db != nullptr) {
                        db[i] += dout * wo[i];
                    }
                }
            }
        }
        if (l > 0) {
            // Gate through the ReLU of the layer below.
            const std::vector<double>& z = pre[l - 1];
            for (std::size_t i = 0; i < delta_below.size(); ++i) {
                if (z[i] <= 0.0) {
                    delta_below[i] = 0.0;
                }
            }
            delta = std::move(delta_below);
        }
    }
    return loss_acc / static_cast<double>(batch * output_dim_);
}

namespace {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    double beta1;
    double beta2;
    double lr;
    int t = 0;

    AdamState(std::size_t n, const DnnConfig& c)
        : m(n, 0.0), v(n, 0.0), beta1(c.beta1), beta2(c.beta2), lr(c.learning_rate) {}

    void step(std::vector<double>& params, const std::vector<double>& grads) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            params[i] -= lr * mhat / (std::sqrt(vhat) + 1e-8);
        }
    }
};

/// Gather standardized rows into a contiguous row-major block.
void gather_standardized(const linalg::Matrix& src, const std::vector<std::size_t>& rows,
                         const Standardizer& stats, std::vector<double>& dst) {
    const std::size_t d = src.cols();
    dst.resize(rows.size() * d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            dst[r * d + j] = stats.standardize(src(rows[r], j), j);
        }
    }
}

} // namespace

DnnModel::DnnModel(const linalg::Matrix& x, const linalg::Matrix& y,
                   const std::vector<std::size_t>& train_rows,
                   const std::vector<std::size_t>& monitor_rows, const DnnConfig& config,
                   std::uint64_t seed)
    : config_(config),
      net_(x.cols(), y.cols(), config.hidden_layers, config.width) {
    if (train_rows.size() < 2) {
        throw Error("fit_dnn: need at least 2 samples");
    }
    input_dim_ = x.cols();
    x_stats_.fit(x, train_rows);
    y_stats_.fit(y, train_rows);

    // Fit/monitoring rows: an explicit monitor set (e.g. the test split, when
    // the caller wants test-convergence stopping) or an internal carve-out.
    std::vector<std::size_t> fit_rows = train_rows;
    std::vector<std::size_t> watch_rows = monitor_rows;
    if (watch_rows.empty()) {
        rng::Stream carve(seed, rng::Space::DnnShuffle, 0);
        carve.shuffle(fit_rows);
        std::size_t n_hold = static_cast<std::size_t>(
            std::llround(config.holdout_fraction * static_cast<double>(fit_rows.size())));
        n_hold = std::min(n_hold, fit_rows.size() - 1);
        if (n_hold > 0) {
            watch_rows.assign(fit_rows.end() - static_cast<std::ptrdiff_t>(n_hold),
                              fit_rows.end());
            fit_rows.resize(fit_rows.size() - n_hold);
        } else {
            watch_rows = fit_rows;
        }
    }

    std::vector<double> xt;
    std::vector<double> yt;
    std::vector<double> xm;
    std::vector<double> ym;
    gather_standardized(x, fit_rows, x_stats_, xt);
    gather_standardized(y, fit_rows, y_stats_, yt);
    gather_standardized(x, watch_rows, x_stats_, xm);
    gather_standardized(y, watch_rows, y_stats_, ym);

    rng::Stream init_stream(seed, rng::Space::DnnInit);
    net_.init_he_uniform(init_stream);
    AdamState adam(net_.parameter_count(), config);

    const std::size_t n_fit = fit_rows.size();
    const std::size_t d = net_.input_dim();
    const std::size_t o = net_.output_dim();
    const std::size_t batch_size = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(config.batch_size, 1)), n_fit);

    std::vector<std::size_t> order(n_fit);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> bx(batch_size * d);
    std::vector<double> by(batch_size * o);

    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> best_params = net_.params();
    int best_epoch = -1;
    int stale_epochs = 0;
    int epochs_run = 0;
    bool stopped_early = false;
    std::vector<double> monitor_history;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        epochs_run = epoch + 1;
        rng::Stream shuffle_stream(seed, rng::Space::DnnShuffle,
                                   static_cast<std::uint64_t>(epoch) + 1);
        shuffle_stream.shuffle(order);
        for (std::size_t start = 0; start < n_fit; start += batch_size) {
            const std::size_t len = std::min(batch_size, n_fit - start);
            for (std::size_t r = 0; r < len; ++r) {
                const std::size_t src = order[start + r];
                std::copy_n(xt.data() + src * d, d, bx.data() + r * d);
                std::copy_n(yt.data() + src * o, o, by.data() + r * o);
            }
            const double batch_loss = net_.loss_and_gradients(bx, by, len);
            if (!std::isfinite(batch_loss)) {
                throw NonFiniteLoss("fit_dnn: non-finite loss at epoch " +
                                    std::to_string(epoch) + ", batch offset " +
                                    std::to_string(start));
            }
            adam.step(net_.params(), net_.grads());
        }

        const double monitored = net_.loss(xm, ym, watch_rows.size());
        if (!std::isfinite(monitored)) {
            throw NonFiniteLoss("fit_dnn: non-finite monitored loss at epoch " +
                                std::to_string(epoch));
        }
        monitor_history.push_back(monitored);
        if (best_loss - monitored > config.min_delta) {
            best_loss = monitored;
            best_params = net_.params();
            best_epoch = epoch;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= config.patience) {
                stopped_early = true;
                break;
            }
        }
    }
    net_.params() = best_params;

    training_log_["epochs_run"] = epochs_run;
    training_log_["best_epoch"] = best_epoch;
    training_log_["best_monitored_loss"] = best_loss;
    training_log_["stopped_early"] = stopped_early;
    training_log_["monitor_rows"] = watch_rows.size();
    training_log_["external_monitor"] = !monitor_rows.empty();
    training_log_["monitor_history_tail"] =
        std::vector<double>(monitor_history.end() -
                                static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                    monitor_history.size(), 10)),
                            monitor_history.end());
}

DnnModel::DnnModel(DnnConfig config, Mlp net, nlohmann::json training_log)
    : config_(config), net_(std::move(net)), training_log_(std::move(training_log)) {}

linalg::Matrix DnnModel::predict(const linalg::Matrix& x) const {
    check_input(x);
    const std::size_t n = x.rows();
    const std::size_t d = net_.input_dim();
    const std::size_t o = net_.output_dim();
    linalg::Matrix out(n, o);
    constexpr std::size_t kChunk = 4096;
    std::vector<double> buf;
    std::vector<double> pred;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t len = std::min(kChunk, n - start);
        buf.resize(len * d);
        for (std::size_t r = 0; r < len; ++r) {
            for (std::size_t j = 0; j < d; ++j) {
                buf[r * d + j] = x_stats_.standardize(x(start + r, j), j);
            }
        }
        net_.forward(buf, len, pred);
        for (std::size_t r = 0; r < len; ++r) {
            for (std::size_t t = 0; t < o; ++t) {
                out(start + r, t) = y_stats_.destandardize(pred[r * o + t], t);
            }
        }
    }
    return out;
}

nlohmann::json DnnModel::hyperparameters() const {
    return {{"hidden_layers", config_.hidden_layers},
            {"width", config_.width},
            {"learning_rate", config_.learning_rate},
            {"beta1", config_.beta1},
            {"beta2", config_.beta2},
            {"batch_size", config_.batch_size},
            {"max_epochs", config_.max_epochs},
            {"min_delta", config_.min_delta},
            {"patience", config_.patience},
            {"holdout_fraction", config_.holdout_fraction}};
}

nlohmann::json DnnModel::diagnostics() const {
    return {{"training", training_log_}};
}

void DnnModel::write_blob(std::ostream& out) const {
    io::write_u32(out, static_cast<std::uint32_t>(config_.hidden_layers));
    io::write_u32(out, static_cast<std::uint32_t>(config_.width));
    io::write_f64(out, config_.learning_rate);
    io::write_f64(out, config_.beta1);
    io::write_f64(out, config_.beta2);
    io::write_u32(out, static_cast<std::uint32_t>(config_.batch_size));
    io::write_u32(out, static_cast<std::uint32_t>(config_.max_epochs));
    io::write_f64(out, config_.min_delta);
    io::write_u32(out, static_cast<std::uint32_t>(config_.patience));
    io::write_f64(out, config_.holdout_fraction);
    io::write_u32(out, static_cast<std::uint32_t>(net_.input_dim()));
    io::write_u32(out, static_cast<std::uint32_t>(net_.output_dim()));
    io::write_u32(out, static_cast<std::uint32_t>(net_.parameter_count()));
    io::write_f64_array(out, net_.params().data(), net_.parameter_count());
}

} // namespace gms::regression
