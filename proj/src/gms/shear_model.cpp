#include "gms/shear_model.hpp"

#include "gms/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gms {

namespace {

constexpr double kStoryMass = 1.0;

/// Add a story quantity (stiffness or dashpot) coupling DoF j to the floor
/// below (or the ground for j = 0) into a dense matrix.
void add_story_coupling(linalg::Matrix& m, std::size_t j, double value) {
    m(j, j) += value;
    if (j > 0) {
        m(j - 1, j - 1) += value;
        m(j, j - 1) -= value;
        m(j - 1, j) -= value;
    }
}

} // namespace

ShearModel::ShearModel(const std::vector<StorySpec>& stories) {
    if (stories.empty()) {
        throw Error("shear model needs at least one story");
    }
    stories_.reserve(stories.size());
    for (const StorySpec& s : stories) {
        if (!(s.stiffness > 0.0)) {
            throw NonPositiveStiffness("story stiffness must be positive");
        }
        stories_.push_back(StoryAssembly{
            BilinearMaterial(s.stiffness, s.yield_force, s.hardening_ratio),
            2.0 * s.damping_ratio * std::sqrt(s.stiffness * kStoryMass),
            kStoryMass,
            s.damping_ratio,
        });
    }
}

void ShearModel::set_trial(const std::vector<double>& u, std::vector<double>& restoring,
                           linalg::Matrix& tangent) {
    const std::size_t n = n_dof();
    if (u.size() != n) {
        throw Error("set_trial: displacement vector has wrong length");
    }
    restoring.assign(n, 0.0);
    tangent = linalg::Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double below = j > 0 ? u[j - 1] : 0.0;
        const auto [force, kt] = stories_[j].spring.set_trial(u[j] - below);
        restoring[j] += force;
        if (j > 0) {
            restoring[j - 1] -= force;
        }
        add_story_coupling(tangent, j, kt);
    }
}

void ShearModel::commit_all() {
    for (auto& s : stories_) {
        s.spring.commit();
    }
}

void ShearModel::revert_all() {
    for (auto& s : stories_) {
        s.spring.revert();
    }
}

std::vector<double> ShearModel::committed_story_forces() const {
    std::vector<double> f(n_dof());
    for (std::size_t j = 0; j < n_dof(); ++j) {
        f[j] = stories_[j].spring.committed().force;
    }
    return f;
}

linalg::Matrix ShearModel::elastic_stiffness() const {
    linalg::Matrix k(n_dof(), n_dof());
    for (std::size_t j = 0; j < n_dof(); ++j) {
        add_story_coupling(k, j, stories_[j].spring.k());
    }
    return k;
}

linalg::Matrix ShearModel::damping() const {
    linalg::Matrix c(n_dof(), n_dof());
    for (std::size_t j = 0; j < n_dof(); ++j) {
        add_story_coupling(c, j, stories_[j].dashpot_c);
    }
    return c;
}

std::vector<double> ShearModel::natural_periods() const {
    // Unit masses make the generalized problem an ordinary symmetric one.
    const linalg::SymmetricEigen eig = linalg::jacobi_eigh(elastic_stiffness());
    std::vector<double> periods(n_dof());
    for (std::size_t i = 0; i < n_dof(); ++i) {
        const double omega_sq = eig.values[n_dof() - 1 - i]; // ascending order
        if (!(omega_sq > 0.0)) {
            throw NonPositiveStiffness("model stiffness matrix is not positive definite");
        }
        periods[i] = 2.0 * std::numbers::pi / std::sqrt(omega_sq);
    }
    return periods;
}

ShearModel ShearModel::from_json(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("stories")) {
        throw ConfigError("model spec must be an object with a 'stories' array");
    }
    for (const auto& [key, value] : spec.items()) {
        if (key != "stories") {
            throw ConfigError("model spec has unknown key '" + key + "'");
        }
    }
    const auto& stories = spec.at("stories");
    if (!stories.is_array() || stories.empty()) {
        throw ConfigError("'stories' must be a non-empty array");
    }
    std::vector<StorySpec> parsed;
    for (const auto& s : stories) {
        if (!s.is_object()) {
            throw ConfigError("each story must be an object");
        }
        for (const auto& [key, value] : s.items()) {
            if (key != "E" && key != "Fy" && key != "xi" && key != "b") {
                throw ConfigError("story spec has unknown key '" + key + "'");
            }
        }
        StorySpec p{};
        try {
            p.stiffness = s.at("E").get<double>();
            p.yield_force = s.at("Fy").get<double>();
            p.damping_ratio = s.at("xi").get<double>();
            p.hardening_ratio = s.value("b", kDefaultHardeningRatio);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("story spec: ") + e.what());
        }
        parsed.push_back(p);
    }
    try {
        return ShearModel(parsed);
    } catch (const Error& e) {
        throw ConfigError(std::string("story spec: ") + e.what());
    }
}

nlohmann::json ShearModel::to_json() const {
    nlohmann::json stories = nlohmann::json::array();
    for (const auto& s : stories_) {
        stories.push_back({{"E", s.spring.k()},
                           {"Fy", s.spring.fy()},
                           {"xi", s.xi},
                           {"b", s.spring.hardening_ratio()}});
    }
    return {{"stories", std::move(stories)}};
}

} // namespace gms
