#include "gms/regression/svr.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/log.hpp"
#include "gms/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace gms::regression {

namespace {

/// SMO over the 2n-variable dual: t < n are the alpha variables (label +1,
/// linear term eps - y_t), t >= n the alpha* variables (label -1, linear
/// term eps + y_{t-n}). Box [0, C], constraint sum(z theta) = 0, objective
/// 1/2 theta' Qhat theta + p' theta with Qhat_ts = z_t z_s K_ts.
struct SmoProblem {
    const linalg::Matrix& kernel; // n x n
    const std::vector<double>& y; // standardized targets
    double c;
    double eps;
    double tol;
    int max_iterations;
};

struct SmoResult {
    std::vector<double> alpha;
    std::vector<double> alpha_star;
    double bias = 0.0;
    bool converged = false;
    int iterations = 0;
};

SmoResult solve_smo(const SmoProblem& prob) {
    const std::size_t n = prob.y.size();
    std::vector<double> theta(2 * n, 0.0);
    std::vector<double> grad(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = prob.eps - prob.y[i];
        grad[n + i] = prob.eps + prob.y[i];
    }
    auto label = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
    auto row = [n](std::size_t t) { return t < n ? t : t - n; };

    SmoResult result;
    double m_up = 0.0;
    double m_low = 0.0;
    int it = 0;
    for (; it < prob.max_iterations; ++it) {
        // Maximal violating pair over -z grad.
        std::size_t best_up = 2 * n;
        std::size_t best_low = 2 * n;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * n; ++t) {
            const double z = label(t);
            const double score = -z * grad[t];
            const bool in_up = (z > 0.0 && theta[t] < prob.c) || (z < 0.0 && theta[t] > 0.0);
            const bool in_low = (z > 0.0 && theta[t] > 0.0) || (z < 0.0 && theta[t] < prob.c);
            if (in_up && score > m_up) {
                m_up = score;
                best_up = t;
            }
            if (in_low && score < m_low) {
                m_low = score;
                best_low = t;
            }
        }
        if (best_up == 2 * n || best_low == 2 * n || m_up - m_low <= prob.tol) {
            result.converged = true;
            break;
        }

        const std::size_t i = best_up;
        const std::size_t j = best_low;
        const std::size_t ri = row(i);
        const std::size_t rj = row(j);
        const double zi = label(i);
        const double zj = label(j);

        // Step d along (theta_i += zi d, theta_j -= zj d) keeps the equality
        // constraint; curvature is K_ii + K_jj - 2 K_ij.
        double eta = prob.kernel(ri, ri) + prob.kernel(rj, rj) - 2.0 * prob.kernel(ri, rj);
        if (eta <= 0.0) {
            eta = 1e-12;
        }
        double d = (m_up - m_low) / eta;
        const double cap_i = zi > 0.0 ? prob.c - theta[i] : theta[i];
        const double cap_j = zj > 0.0 ? theta[j] : prob.c - theta[j];
        d = std::min(d, std::min(cap_i, cap_j));

        theta[i] += zi * d;
        theta[j] -= zj * d;
        theta[i] = std::clamp(theta[i], 0.0, prob.c);
        theta[j] = std::clamp(theta[j], 0.0, prob.c);

        for (std::size_t t = 0; t < 2 * n; ++t) {
            const double dk = prob.kernel(row(t), ri) - prob.kernel(row(t), rj);
            grad[t] += label(t) * d * dk;
        }
    }
    result.iterations = it;
    result.bias = 0.5 * (m_up + m_low);
    result.alpha.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(n));
    result.alpha_star.assign(theta.begin() + static_cast<std::ptrdiff_t>(n), theta.end());
    return result;
}

} // namespace

SvrModel::SvrModel(const linalg::Matrix& x, const linalg::Matrix& y,
                   const std::vector<std::size_t>& rows, const SvrConfig& config,
                   std::uint64_t seed)
    : config_(config) {
    if (rows.size() < 2) {
        throw Error("fit_svr: need at least 2 samples");
    }
    if (!(config.c > 0.0) || !(config.epsilon >= 0.0)) {
        throw Error("fit_svr: C must be positive and epsilon nonnegative");
    }
    input_dim_ = x.cols();
    x_stats_.fit(x, rows);
    y_stats_.fit(y, rows);
    gamma_used_ = config.gamma > 0.0 ? config.gamma : 1.0 / static_cast<double>(x.cols());

    // Kernel methods are quadratic in rows; cap the training set with a
    // seeded uniform subsample (without replacement), kept in sorted order.
    std::vector<std::size_t> selected = rows;
    if (selected.size() > static_cast<std::size_t>(config.max_train)) {
        rng::Stream stream(seed, rng::Space::SvrSubsample);
        stream.shuffle(selected);
        selected.resize(static_cast<std::size_t>(config.max_train));
        std::sort(selected.begin(), selected.end());
    }
    const std::size_t n = selected.size();

    // Standardized training block, rows in subsample order.
    linalg::Matrix xs(n, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < x.cols(); ++f) {
            xs(i, f) = x_stats_.standardize(x(selected[i], f), f);
        }
    }
    linalg::Matrix kernel(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist2 = 0.0;
            for (std::size_t f = 0; f < x.cols(); ++f) {
                const double diff = xs(i, f) - xs(j, f);
                dist2 += diff * diff;
            }
            const double k = std::exp(-gamma_used_ * dist2);
            kernel(i, j) = kernel(j, i) = k;
        }
    }

    for (std::size_t t = 0; t < y.cols(); ++t) {
        std::vector<double> ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            ys[i] = y_stats_.standardize(y(selected[i], t), t);
        }
        const SmoResult smo = solve_smo(
            {kernel, ys, config_.c, config_.epsilon, config_.kkt_tol, config_.max_iterations});
        if (!smo.converged) {
            log::warn("fit_svr: target " + std::to_string(t) + " hit the iteration cap (" +
                      std::to_string(smo.iterations) + "); using attained duals");
        }

        TargetMachine machine;
        machine.bias = smo.bias;
        machine.converged = smo.converged;
        machine.iterations = smo.iterations;
        machine.alpha = smo.alpha;
        machine.alpha_star = smo.alpha_star;
        std::vector<std::size_t> sv_rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (smo.alpha[i] - smo.alpha_star[i] != 0.0) {
                sv_rows.push_back(i);
            }
        }
        machine.beta.reserve(sv_rows.size());
        machine.sv = linalg::Matrix(sv_rows.size(), x.cols());
        for (std::size_t s = 0; s < sv_rows.size(); ++s) {
            machine.beta.push_back(smo.alpha[sv_rows[s]] - smo.alpha_star[sv_rows[s]]);
            for (std::size_t f = 0; f < x.cols(); ++f) {
                machine.sv(s, f) = xs(sv_rows[s], f);
            }
        }
        machines_.push_back(std::move(machine));
    }
}

SvrModel::SvrModel(SvrConfig config, double gamma_used, std::vector<TargetMachine> machines)
    : config_(config), gamma_used_(gamma_used), machines_(std::move(machines)) {}

linalg::Matrix SvrModel::predict(const linalg::Matrix& x) const {
    check_input(x);
    linalg::Matrix out(x.rows(), machines_.size());
    std::vector<double> xs(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t f = 0; f < x.cols(); ++f) {
            xs[f] = x_stats_.standardize(x(i, f), f);
        }
        for (std::size_t t = 0; t < machines_.size(); ++t) {
            const TargetMachine& m = machines_[t];
            double f_val = m.bias;
            for (std::size_t s = 0; s < m.beta.size(); ++s) {
                double dist2 = 0.0;
                for (std::size_t f = 0; f < x.cols(); ++f) {
                    const double diff = xs[f] - m.sv(s, f);
                    dist2 += diff * diff;
                }
                f_val += m.beta[s] * std::exp(-gamma_used_ * dist2);
            }
            out(i, t) = y_stats_.destandardize(f_val, t);
        }
    }
    return out;
}

nlohmann::json SvrModel::hyperparameters() const {
    return {{"C", config_.c},
            {"epsilon", config_.epsilon},
            {"gamma", gamma_used_},
            {"gamma_mode", config_.gamma > 0.0 ? "explicit" : "auto"},
            {"max_train", config_.max_train},
            {"max_iterations", config_.max_iterations},
            {"kkt_tol", config_.kkt_tol}};
}

nlohmann::json SvrModel::diagnostics() const {
    nlohmann::json per_target = nlohmann::json::array();
    for (const TargetMachine& m : machines_) {
        per_target.push_back({{"converged", m.converged},
                              {"iterations", m.iterations},
                              {"support_vectors", m.beta.size()}});
    }
    return {{"targets", std::move(per_target)}};
}

void SvrModel::write_blob(std::ostream& out) const {
    io::write_f64(out, config_.c);
    io::write_f64(out, config_.epsilon);
    io::write_f64(out, gamma_used_);
    // The configured value too (<= 0 means auto), so a reloaded model
    // reports the same gamma_mode it was fitted with.
    io::write_f64(out, config_.gamma);
    io::write_u32(out, static_cast<std::uint32_t>(config_.max_train));
    io::write_u32(out, static_cast<std::uint32_t>(config_.max_iterations));
    io::write_f64(out, config_.kkt_tol);
    io::write_u32(out, static_cast<std::uint32_t>(machines_.size()));
    for (const TargetMachine& m : machines_) {
        io::write_u32(out, static_cast<std::uint32_t>(m.beta.size()));
        io::write_u32(out, static_cast<std::uint32_t>(m.sv.cols()));
        io::write_f64(out, m.bias);
        io::write_u32(out, m.converged ? 1 : 0);
        io::write_u32(out, static_cast<std::uint32_t>(m.iterations));
        for (double b : m.beta) {
            io::write_f64(out, b);
        }
        io::write_f64_array(out, m.sv.data().data(), m.sv.data().size());
    }
}

} // namespace gms::regression
