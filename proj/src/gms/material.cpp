#include "gms/material.hpp"

#include "gms/error.hpp"

#include <cmath>

namespace gms {

BilinearMaterial::BilinearMaterial(double k, double fy, double b) : k_(k), fy_(fy), b_(b) {
    if (!(k > 0.0)) {
        throw NonPositiveStiffness("material stiffness must be positive");
    }
    if (!(fy > 0.0)) {
        throw Error("yield force must be positive");
    }
    if (b < 0.0 || b >= 1.0) {
        throw Error("hardening ratio must lie in [0, 1)");
    }
    hardening_modulus_ = b_ * k_ / (1.0 - b_);
}

BilinearMaterial::Trial BilinearMaterial::set_trial(double u_trial) {
    // Classical radial return for 1-D kinematic hardening: elastic predictor,
    // then project back onto the translated yield surface |f - alpha| = fy.
    const double f_elastic = committed_.force + k_ * (u_trial - committed_.u);
    const double xi = f_elastic - committed_.alpha;

    trial_.u = u_trial;
    if (std::abs(xi) <= fy_) {
        trial_.force = f_elastic;
        trial_.alpha = committed_.alpha;
        return {trial_.force, k_};
    }
    const double sign = xi > 0.0 ? 1.0 : -1.0;
    const double dgamma = (std::abs(xi) - fy_) / (k_ + hardening_modulus_);
    trial_.force = f_elastic - k_ * dgamma * sign;
    trial_.alpha = committed_.alpha + hardening_modulus_ * dgamma * sign;
    return {trial_.force, b_ * k_};
}

} // namespace gms
