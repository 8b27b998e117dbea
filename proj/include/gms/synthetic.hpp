#pragma once

#include "gms/ground_motion.hpp"

#include <cstdint>
#include <vector>

namespace gms {

/// Deterministic synthetic strong-motion record: a sum of random-phase
/// sinusoids shaped by a Kanai-Tajimi-like spectral envelope, modulated in
/// time by a gamma-type amplitude envelope, and scaled to a target PGA.
/// Good enough to exercise the full pipeline when no recorded suite is at
/// hand; not a substitute for real records.
GroundMotionRecord synthetic_record(std::uint64_t seed, std::uint64_t index, double dt);

/// A suite of `count` synthetic records with durations spread over
/// 40..88 s and PGAs over 0.2..0.8 g, aligned to the (dt, duration) grid.
SuiteMatrix synthetic_suite(std::size_t count, std::uint64_t seed, double dt, double duration);

} // namespace gms
