#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gms/ground_motion.hpp"

namespace helpers {

/// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("gms_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline gms::GroundMotionRecord make_record(std::string id, double dt,
                                           std::vector<double> accel) {
    gms::GroundMotionRecord r;
    r.id = std::move(id);
    r.dt = dt;
    r.accel = std::move(accel);
    return r;
}

/// Single-frequency pulse with a linear ramp envelope, amplitude in g.
inline gms::GroundMotionRecord sine_record(std::string id, double dt, std::size_t n,
                                           double amp_g, double freq_hz) {
    std::vector<double> accel(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double ramp = std::min(1.0, t / (0.1 * static_cast<double>(n) * dt));
        accel[i] = amp_g * ramp * std::sin(2.0 * M_PI * freq_hz * t);
    }
    return make_record(std::move(id), dt, std::move(accel));
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace helpers
