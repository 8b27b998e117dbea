#pragma once

#include "gms/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms {

/// Supervised learning table: X holds basis weights followed by the material
/// parameters of each story; Y holds the two EDPs (peak roof displacement,
/// peak floor acceleration in m/s^2).
struct Dataset {
    linalg::Matrix x; // n x d
    linalg::Matrix y; // n x 2
    std::vector<std::string> feature_names;  // length d
    std::vector<std::string> target_names;   // length 2
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;       // master seed the rows were generated with
    nlohmann::json metadata;      // generation config echo, basis id, etc.

    std::size_t n() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

/// Disjoint uniform shuffle split; test gets round(n * test_fraction) rows.
/// The shuffle stream is derived from (seed, Split), so the same seed always
/// produces the same split and never reuses generation randomness.
void split_dataset(Dataset& ds, double test_fraction, std::uint64_t seed);

/// Binary dataset ("QDATA01", row-major X then Y) plus a JSON sidecar with
/// names, split indices, seed, and metadata.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace gms
