#include "gms/dataset.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace gms {

namespace {

constexpr char kDatasetMagic[7] = {'Q', 'D', 'A', 'T', 'A', '0', '1'};

} // namespace

void split_dataset(Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0) || test_fraction >= 1.0) {
        throw Error("split_dataset: test_fraction must lie in [0, 1)");
    }
    const std::size_t n = ds.n();
    if (n == 0) {
        throw Error("split_dataset: dataset is empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Stream stream(seed, rng::Space::Split);
    stream.shuffle(order);

    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    ds.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    ds.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    // Sorted index lists are easier to diff and independent of shuffle order
    // beyond membership.
    std::sort(ds.test_indices.begin(), ds.test_indices.end());
    std::sort(ds.train_indices.begin(), ds.train_indices.end());
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write dataset file: " + path.string());
    }
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    io::write_u32(out, static_cast<std::uint32_t>(ds.n()));
    io::write_u32(out, static_cast<std::uint32_t>(ds.dim()));
    io::write_u32(out, 2);
    // Row-major X then Y.
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            io::write_f64(out, ds.x(i, j));
        }
    }
    for (std::size_t i = 0; i < ds.n(); ++i) {
        io::write_f64(out, ds.y(i, 0));
        io::write_f64(out, ds.y(i, 1));
    }
    out.close();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }

    nlohmann::json sidecar;
    sidecar["format"] = "QDATA01";
    sidecar["n"] = ds.n();
    sidecar["d"] = ds.dim();
    sidecar["sha256"] = io::sha256_file(path);
    sidecar["feature_names"] = ds.feature_names;
    sidecar["target_names"] = ds.target_names;
    sidecar["train_indices"] = ds.train_indices;
    sidecar["test_indices"] = ds.test_indices;
    sidecar["seed"] = ds.seed;
    sidecar["metadata"] = ds.metadata;
    io::write_json_file(path.string() + ".json", sidecar);
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset file: " + path.string());
    }
    char magic[7];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 7, kDatasetMagic)) {
        throw IoError("not a QDATA01 file: " + path.string());
    }
    Dataset ds;
    const std::size_t n = io::read_u32(in);
    const std::size_t d = io::read_u32(in);
    const std::size_t n_targets = io::read_u32(in);
    if (n_targets != 2) {
        throw IoError("dataset declares " + std::to_string(n_targets) + " targets, expected 2");
    }
    ds.x = linalg::Matrix(n, d);
    ds.y = linalg::Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            ds.x(i, j) = io::read_f64(in);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        ds.y(i, 0) = io::read_f64(in);
        ds.y(i, 1) = io::read_f64(in);
    }

    const std::filesystem::path sidecar_path = path.string() + ".json";
    if (std::filesystem::exists(sidecar_path)) {
        const nlohmann::json sidecar = io::read_json_file(sidecar_path);
        if (sidecar.contains("feature_names")) {
            ds.feature_names = sidecar.at("feature_names").get<std::vector<std::string>>();
        }
        if (sidecar.contains("target_names")) {
            ds.target_names = sidecar.at("target_names").get<std::vector<std::string>>();
        }
        if (sidecar.contains("train_indices")) {
            ds.train_indices = sidecar.at("train_indices").get<std::vector<std::size_t>>();
        }
        if (sidecar.contains("test_indices")) {
            ds.test_indices = sidecar.at("test_indices").get<std::vector<std::size_t>>();
        }
        if (sidecar.contains("seed")) {
            ds.seed = sidecar.at("seed").get<std::uint64_t>();
        }
        if (sidecar.contains("metadata")) {
            ds.metadata = sidecar.at("metadata");
        }
    }
    return ds;
}

} // namespace gms
