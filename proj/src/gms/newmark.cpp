#include "gms/newmark.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace gms {

namespace {

// Average acceleration: gamma = 1/2, beta = 1/4.
constexpr double kGamma = 0.5;
constexpr double kBeta = 0.25;

struct StepState {
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> a;
};

/// One Newmark step of length h toward ground acceleration ag_end, Newton
/// iterating from the committed state in `from`. On success `to` holds the
/// converged state and the model's trial state matches it; on failure the
/// residual norm is reported and the model trial state is left dirty (the
/// caller reverts).
bool advance_step(ShearModel& model, const linalg::Matrix& damping, double h, double ag_end,
                  const StepState& from, StepState& to, const NewmarkOptions& opts,
                  double& residual_norm) {
    const std::size_t n = from.u.size();
    std::vector<double> u = from.u; // predictor: zero displacement increment
    std::vector<double> a(n);
    std::vector<double> v(n);
    std::vector<double> restoring;
    std::vector<double> residual(n);
    linalg::Matrix tangent;

    const double inv_bh2 = 1.0 / (kBeta * h * h);
    const double inv_bh = 1.0 / (kBeta * h);
    const double a_coef = 1.0 / (2.0 * kBeta) - 1.0;
    const double v_coef = kGamma / (kBeta * h);

    auto evaluate = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = (u[i] - from.u[i]) * inv_bh2 - from.v[i] * inv_bh - a_coef * from.a[i];
            v[i] = from.v[i] + h * ((1.0 - kGamma) * from.a[i] + kGamma * a[i]);
        }
        model.set_trial(u, restoring, tangent);
        const std::vector<double> cv = linalg::matvec(damping, v);
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] = a[i] + cv[i] + restoring[i] + ag_end; // unit masses
        }
        residual_norm = linalg::norm_inf(residual);
    };

    for (int it = 0; it < opts.max_iterations; ++it) {
        evaluate();
        if (residual_norm <= opts.tol_force) {
            to = {std::move(u), std::move(v), std::move(a)};
            return true;
        }
        linalg::Matrix k_eff = tangent;
        for (std::size_t j = 0; j < n; ++j) {
            k_eff(j, j) += inv_bh2;
            for (std::size_t i = 0; i < n; ++i) {
                k_eff(i, j) += v_coef * damping(i, j);
            }
        }
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = -residual[i];
        }
        const std::vector<double> du = linalg::solve_dense(std::move(k_eff), std::move(rhs));
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += du[i];
        }
        if (linalg::norm_inf(du) <= opts.tol_disp) {
            evaluate(); // leave state and materials consistent with final u
            to = {std::move(u), std::move(v), std::move(a)};
            return true;
        }
    }
    return false;
}

} // namespace

ResponseHistory newmark_solve(ShearModel& model, const GroundMotionRecord& ground,
                              const NewmarkOptions& opts) {
    ground.validate();
    const std::size_t n_steps = ground.n_samples();
    const std::size_t n = model.n_dof();

    ResponseHistory hist;
    hist.dt = ground.dt;
    hist.ground_id = ground.id;
    hist.ground_accel.resize(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        hist.ground_accel[i] = ground.accel[i] * kGravity;
    }
    hist.u = linalg::Matrix(n_steps, n);
    hist.v = linalg::Matrix(n_steps, n);
    hist.a_rel = linalg::Matrix(n_steps, n);
    hist.a_total = linalg::Matrix(n_steps, n);
    hist.story_force = linalg::Matrix(n_steps, n);
    hist.dashpot_c.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        hist.dashpot_c[j] = model.story(j).dashpot_c;
    }

    const linalg::Matrix damping = model.damping();

    StepState state;
    state.u = opts.initial_displacement.empty() ? std::vector<double>(n, 0.0)
                                                : opts.initial_displacement;
    state.v = opts.initial_velocity.empty() ? std::vector<double>(n, 0.0)
                                            : opts.initial_velocity;
    if (state.u.size() != n || state.v.size() != n) {
        throw Error("newmark_solve: initial condition length does not match n_dof");
    }

    // Consistent initial acceleration from the equation of motion at t = 0.
    std::vector<double> restoring;
    linalg::Matrix tangent;
    model.set_trial(state.u, restoring, tangent);
    model.commit_all();
    {
        const std::vector<double> cv = linalg::matvec(damping, state.v);
        state.a.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            state.a[i] = -hist.ground_accel[0] - cv[i] - restoring[i];
        }
    }

    auto record_step = [&](std::size_t step, const StepState& s) {
        const std::vector<double> forces = model.committed_story_forces();
        for (std::size_t i = 0; i < n; ++i) {
            hist.u(step, i) = s.u[i];
            hist.v(step, i) = s.v[i];
            hist.a_rel(step, i) = s.a[i];
            hist.a_total(step, i) = s.a[i] + hist.ground_accel[step];
            hist.story_force(step, i) = forces[i];
        }
    };
    record_step(0, state);

    StepState next;
    for (std::size_t step = 1; step < n_steps; ++step) {
        const double ag0 = hist.ground_accel[step - 1];
        const double ag1 = hist.ground_accel[step];
        double residual_norm = 0.0;
        if (advance_step(model, damping, hist.dt, ag1, state, next, opts, residual_norm)) {
            model.commit_all();
            state = next;
        } else {
            // Retry once with 4x substepping, interpolating the ground
            // acceleration at the quarter points.
            model.revert_all();
            const int kSub = 4;
            const double h = hist.dt / kSub;
            for (int q = 1; q <= kSub; ++q) {
                const double ag_q = ag0 + (ag1 - ag0) * static_cast<double>(q) / kSub;
                if (!advance_step(model, damping, h, ag_q, state, next, opts, residual_norm)) {
                    model.revert_all();
                    throw NonConvergence(step, residual_norm,
                                         "newmark_solve: step " + std::to_string(step) +
                                             " failed to converge (residual " +
                                             std::to_string(residual_norm) +
                                             ") even with substepping");
                }
                model.commit_all();
                state = next;
            }
        }
        record_step(step, state);
    }
    return hist;
}

EDP extract_edps(const ResponseHistory& history) {
    EDP edp;
    const std::size_t n_steps = history.n_steps();
    const std::size_t n = history.n_dof();
    if (n_steps == 0 || n == 0) {
        return edp;
    }
    const std::size_t roof = n - 1;
    for (std::size_t t = 0; t < n_steps; ++t) {
        edp.peak_roof_disp = std::max(edp.peak_roof_disp, std::abs(history.u(t, roof)));
        for (std::size_t i = 0; i < n; ++i) {
            edp.peak_floor_accel = std::max(edp.peak_floor_accel, std::abs(history.a_total(t, i)));
        }
    }
    return edp;
}

EnergyBalance energy_balance(const ResponseHistory& history) {
    EnergyBalance e;
    const std::size_t n_steps = history.n_steps();
    const std::size_t n = history.n_dof();
    if (n_steps < 2) {
        return e;
    }

    // Power terms per step for the trapezoid rule. Unit masses throughout.
    auto input_power = [&](std::size_t t) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p -= history.ground_accel[t] * history.v(t, i);
        }
        return p;
    };
    auto viscous_power = [&](std::size_t t) {
        double p = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double below = j > 0 ? history.v(t, j - 1) : 0.0;
            const double drift_rate = history.v(t, j) - below;
            p += history.dashpot_c[j] * drift_rate * drift_rate;
        }
        return p;
    };
    for (std::size_t t = 0; t + 1 < n_steps; ++t) {
        e.input += 0.5 * (input_power(t) + input_power(t + 1)) * history.dt;
        e.viscous += 0.5 * (viscous_power(t) + viscous_power(t + 1)) * history.dt;
        for (std::size_t j = 0; j < n; ++j) {
            const double below0 = j > 0 ? history.u(t, j - 1) : 0.0;
            const double below1 = j > 0 ? history.u(t + 1, j - 1) : 0.0;
            const double d0 = history.u(t, j) - below0;
            const double d1 = history.u(t + 1, j) - below1;
            e.strain_hysteretic +=
                0.5 * (history.story_force(t, j) + history.story_force(t + 1, j)) * (d1 - d0);
        }
    }
    double ke_start = 0.0;
    double ke_end = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ke_start += 0.5 * history.v(0, i) * history.v(0, i);
        ke_end += 0.5 * history.v(n_steps - 1, i) * history.v(n_steps - 1, i);
    }
    e.kinetic = ke_end - ke_start;
    e.residual = e.input - (e.kinetic + e.viscous + e.strain_hysteretic);
    return e;
}

void save_response_csv(const ResponseHistory& history, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "t";
    for (std::size_t j = 1; j <= history.n_dof(); ++j) {
        out << ",u" << j << ",v" << j << ",a_total" << j << ",force" << j;
    }
    out << '\n';
    for (std::size_t t = 0; t < history.n_steps(); ++t) {
        out << io::format_full(static_cast<double>(t) * history.dt);
        for (std::size_t j = 0; j < history.n_dof(); ++j) {
            out << ',' << io::format_full(history.u(t, j));
            out << ',' << io::format_full(history.v(t, j));
            out << ',' << io::format_full(history.a_total(t, j));
            out << ',' << io::format_full(history.story_force(t, j));
        }
        out << '\n';
    }
    io::write_text_file(path, out.str());
}

} // namespace gms
