#pragma once

#include "gms/linalg.hpp"
#include "gms/material.hpp"

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms {

/// Per-story parameters in the stiffness-valued unit convention: E doubles
/// as the story elastic stiffness, Fy as the story yield force, so a 1-DoF
/// story with E = 4*pi^2 and unit mass has a 1 s period.
struct StorySpec {
    double stiffness;       // E
    double yield_force;     // Fy
    double damping_ratio;   // xi
    double hardening_ratio; // b
};

/// One story: hysteretic spring plus viscous dashpot across the same drift.
struct StoryAssembly {
    BilinearMaterial spring;
    double dashpot_c; // 2*xi*sqrt(k*m)
    double mass;      // 1.0 throughout
    double xi;        // stored for provenance
};

/// N-story shear building with unit lumped masses, story 1 at the base.
/// Instances carry trial state; clone per worker, never share one across
/// threads.
class ShearModel {
public:
    explicit ShearModel(const std::vector<StorySpec>& stories);

    std::size_t n_dof() const { return stories_.size(); }
    StoryAssembly& story(std::size_t i) { return stories_[i]; }
    const StoryAssembly& story(std::size_t i) const { return stories_[i]; }

    /// Restoring forces and tangent for trial floor displacements u
    /// (relative to ground). Updates every spring's trial state.
    void set_trial(const std::vector<double>& u, std::vector<double>& restoring,
                   linalg::Matrix& tangent);

    void commit_all();
    void revert_all();

    /// Committed spring force of each story (drift force, not nodal).
    std::vector<double> committed_story_forces() const;

    linalg::Matrix elastic_stiffness() const;
    linalg::Matrix damping() const;

    /// Periods of the underlying linear model, seconds, descending
    /// (fundamental first).
    std::vector<double> natural_periods() const;

    /// Parse `{"stories": [{"E":..,"Fy":..,"xi":..,"b":..}, ...]}`; b is
    /// optional and defaults to 0.02. Unknown keys are rejected.
    static ShearModel from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;

private:
    std::vector<StoryAssembly> stories_;
};

/// Default hardening ratio when a story spec leaves b out.
inline constexpr double kDefaultHardeningRatio = 0.02;

} // namespace gms
