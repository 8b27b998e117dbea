#pragma once

namespace gms {

/// Uniaxial bilinear material with kinematic hardening (no isotropic
/// hardening). Follows the finite-element trial/commit convention: set_trial
/// computes a candidate state from the committed one; commit makes it
/// permanent; revert discards it. The yield surface |f - alpha| <= fy
/// translates with the back force alpha, so the elastic range is always
/// exactly 2*fy wide.
class BilinearMaterial {
public:
    struct State {
        double u = 0.0;     // displacement
        double force = 0.0; // resisting force
        double alpha = 0.0; // back force (center of the yield surface)
    };

    /// k: elastic stiffness, fy: yield force, b: hardening ratio in [0, 1).
    /// Post-yield stiffness is b*k, which maps to a hardening modulus
    /// H = b*k/(1-b) in the return mapping below.
    BilinearMaterial(double k, double fy, double b);

    /// Returns (force, tangent). Pure function of the committed state and
    /// u_trial; calling it repeatedly with different u_trial is safe.
    struct Trial {
        double force;
        double tangent;
    };
    Trial set_trial(double u_trial);

    void commit() { committed_ = trial_; }
    void revert() { trial_ = committed_; }

    const State& committed() const { return committed_; }
    const State& trial() const { return trial_; }

    double k() const { return k_; }
    double fy() const { return fy_; }
    double hardening_ratio() const { return b_; }
    double yield_displacement() const { return fy_ / k_; }

private:
    double k_;
    double fy_;
    double b_;
    double hardening_modulus_; // H = b*k/(1-b)
    State committed_;
    State trial_;
};

} // namespace gms
