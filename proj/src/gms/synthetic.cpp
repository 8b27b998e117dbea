#include "gms/synthetic.hpp"

#include "gms/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gms {

namespace {

/// Kanai-Tajimi amplitude shape: broadband with a soil-column resonance.
double kanai_tajimi_amplitude(double f, double f_ground, double zeta_ground) {
    const double r = f / f_ground;
    const double r2 = r * r;
    const double num = 1.0 + 4.0 * zeta_ground * zeta_ground * r2;
    const double den = (1.0 - r2) * (1.0 - r2) + 4.0 * zeta_ground * zeta_ground * r2;
    return std::sqrt(num / den);
}

/// Gamma-type envelope, unit peak at t = t_peak, slow exponential decay.
double amplitude_envelope(double t, double t_peak) {
    if (t <= 0.0) {
        return 0.0;
    }
    const double x = t / t_peak;
    return x * x * std::exp(2.0 * (1.0 - x));
}

} // namespace

GroundMotionRecord synthetic_record(std::uint64_t seed, std::uint64_t index, double dt) {
    rng::Stream stream(seed, rng::Space::Synthetic, index);

    const double duration = stream.uniform(40.0, 88.0);
    const double pga_target = stream.uniform(0.2, 0.8);
    const double f_ground = stream.uniform(1.5, 4.0);  // Hz
    const double zeta_ground = stream.uniform(0.4, 0.8);
    const double t_peak = duration * stream.uniform(0.12, 0.25);

    // Log-spaced component frequencies with jitter; 0.15..12 Hz brackets the
    // structural periods of interest with margin on both sides.
    constexpr int kComponents = 24;
    const double log_lo = std::log(0.15);
    const double log_hi = std::log(12.0);
    double freq[kComponents];
    double amp[kComponents];
    double phase[kComponents];
    for (int k = 0; k < kComponents; ++k) {
        const double frac = (static_cast<double>(k) + stream.next_double()) /
                            static_cast<double>(kComponents);
        freq[k] = std::exp(log_lo + frac * (log_hi - log_lo));
        amp[k] = kanai_tajimi_amplitude(freq[k], f_ground, zeta_ground);
        phase[k] = stream.uniform(0.0, 2.0 * std::numbers::pi);
    }

    GroundMotionRecord rec;
    rec.id = "synthetic_" + std::to_string(index);
    rec.dt = dt;
    const std::size_t n = suite_steps(duration, dt);
    rec.accel.resize(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double carrier = 0.0;
        for (int k = 0; k < kComponents; ++k) {
            carrier += amp[k] * std::sin(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
        }
        rec.accel[i] = amplitude_envelope(t, t_peak) * carrier;
        peak = std::max(peak, std::abs(rec.accel[i]));
    }
    const double scale = peak > 0.0 ? pga_target / peak : 0.0;
    for (double& a : rec.accel) {
        a *= scale;
    }
    rec.source_meta["format"] = "synthetic";
    rec.source_meta["seed"] = std::to_string(seed);
    rec.source_meta["index"] = std::to_string(index);
    return rec;
}

SuiteMatrix synthetic_suite(std::size_t count, std::uint64_t seed, double dt, double duration) {
    std::vector<GroundMotionRecord> records;
    records.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        records.push_back(synthetic_record(seed, j, dt));
    }
    return build_suite(records, dt, duration);
}

} // namespace gms
