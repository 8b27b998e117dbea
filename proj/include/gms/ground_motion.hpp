#pragma once

#include "gms/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gms {

/// Standard gravity in m/s^2, used wherever accelerations in g feed the
/// equation of motion or an integral in SI units.
inline constexpr double kGravity = 9.80665;

/// One horizontal acceleration component, uniformly sampled, stored in g.
struct GroundMotionRecord {
    std::string id;
    double dt = 0.0;            // sampling interval [s]
    std::vector<double> accel;  // acceleration [g]
    std::map<std::string, std::string> source_meta;

    std::size_t n_samples() const { return accel.size(); }
    double duration() const {
        return accel.empty() ? 0.0 : dt * static_cast<double>(accel.size() - 1);
    }

    /// Throws unless dt > 0, at least one sample, and every sample finite.
    void validate() const;
};

/// Parse PEER AT2 content: three free-text header lines, a fourth line
/// carrying "NPTS= n, DT= x SEC", then whitespace-separated samples in g.
GroundMotionRecord parse_at2(const std::string& text, const std::string& id);

/// Parse two-column CSV content with a "time,accel_g" header row. The time
/// column must be a uniform grid.
GroundMotionRecord parse_csv_record(const std::string& text, const std::string& id);

/// Dispatch on extension (.at2 or .csv, case-insensitive).
GroundMotionRecord load_record(const std::filesystem::path& path);

void save_record_csv(const GroundMotionRecord& record, const std::filesystem::path& path);

/// Linear interpolation onto a grid with spacing dt_target. The resampled
/// record spans the same duration (the last partial interval is dropped).
GroundMotionRecord resample(const GroundMotionRecord& record, double dt_target);

/// Zero-pad to n_steps, or truncate with a warning when the record is longer.
GroundMotionRecord pad_or_truncate(const GroundMotionRecord& record, std::size_t n_steps);

/// Number of grid points covering [0, duration] at spacing dt.
std::size_t suite_steps(double duration, double dt);

/// Suite of records on a common grid, one record per column.
struct SuiteMatrix {
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::vector<std::string> record_ids;
    std::vector<std::map<std::string, std::string>> source_meta; // parallel to record_ids
    linalg::Matrix data; // n_steps x m, acceleration in g

    std::size_t m() const { return record_ids.size(); }
    GroundMotionRecord column(std::size_t j) const;
};

/// Resample every record to dt and pad/truncate to the common duration.
SuiteMatrix build_suite(const std::vector<GroundMotionRecord>& records, double dt,
                        double duration);

/// Binary suite file ("QSUITE01") plus a JSON manifest at <path>.json with
/// dt and per-record identity/source metadata.
void save_suite(const SuiteMatrix& suite, const std::filesystem::path& path);
SuiteMatrix load_suite(const std::filesystem::path& path);

} // namespace gms
