#pragma once

#include "gms/ground_motion.hpp"
#include "gms/linalg.hpp"
#include "gms/shear_model.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace gms {

struct NewmarkOptions {
    double tol_force = 1e-8; // residual infinity-norm, force units
    double tol_disp = 1e-12; // Newton increment infinity-norm
    int max_iterations = 50;
    /// Verification hook: start from these instead of rest. Production runs
    /// leave them empty.
    std::vector<double> initial_displacement;
    std::vector<double> initial_velocity;
};

/// Full response of one time-history analysis. Displacements/velocities are
/// relative to the ground; a_total adds the ground acceleration back in.
struct ResponseHistory {
    double dt = 0.0;
    std::string ground_id;
    std::vector<double> ground_accel; // m/s^2, one entry per step
    linalg::Matrix u;                 // n_steps x n_dof
    linalg::Matrix v;
    linalg::Matrix a_rel;
    linalg::Matrix a_total;
    linalg::Matrix story_force;       // committed spring force per story
    std::vector<double> dashpot_c;    // per story, for the energy audit

    std::size_t n_steps() const { return u.rows(); }
    std::size_t n_dof() const { return u.cols(); }
};

/// Constant-average-acceleration Newmark (gamma = 1/2, beta = 1/4) with
/// Newton-Raphson on the dynamic residual M a + C v + f_s(u) + M iota a_g.
/// Ground acceleration is converted from g to m/s^2 at solve time. A step
/// that fails to converge is retried once with 4x substepping before
/// NonConvergence is thrown. Materials commit exactly once per converged
/// (sub)step.
ResponseHistory newmark_solve(ShearModel& model, const GroundMotionRecord& ground,
                              const NewmarkOptions& opts = {});

struct EDP {
    double peak_roof_disp = 0.0;  // length units
    double peak_floor_accel = 0.0; // m/s^2
    double peak_floor_accel_g() const { return peak_floor_accel / kGravity; }
};

/// peak_roof_disp = max |u| of the top story; peak_floor_accel = max |a_total|
/// over every story and step.
EDP extract_edps(const ResponseHistory& history);

/// Energy audit by trapezoidal quadrature. residual = input - (kinetic +
/// viscous + strain_hysteretic); kinetic is the net change from the first
/// step. A small residual relative to input is the solver's health check.
struct EnergyBalance {
    double input = 0.0;
    double kinetic = 0.0;
    double viscous = 0.0;
    double strain_hysteretic = 0.0;
    double residual = 0.0;
};

EnergyBalance energy_balance(const ResponseHistory& history);

/// Plot-ready time history: header row, then per step the time followed by
/// u, v, a_total and committed spring force of every story.
void save_response_csv(const ResponseHistory& history, const std::filesystem::path& path);

} // namespace gms
