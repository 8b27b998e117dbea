#include "gms/regression/forest.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/parallel.hpp"
#include "gms/rng.hpp"

#include <ostream>

namespace gms::regression {

RandomForestModel::RandomForestModel(const linalg::Matrix& x, const linalg::Matrix& y,
                                     const std::vector<std::size_t>& rows,
                                     const RfConfig& config, std::uint64_t seed, int workers)
    : config_(config), n_targets_(y.cols()) {
    if (rows.size() < 2) {
        throw Error("fit_rf: need at least 2 samples");
    }
    if (config_.n_trees < 1) {
        throw Error("fit_rf: n_trees must be at least 1");
    }
    input_dim_ = x.cols();
    x_stats_.fit(x, rows);
    y_stats_.fit(y, rows);

    std::vector<std::vector<double>> targets(n_targets_, std::vector<double>(y.rows()));
    for (std::size_t t = 0; t < n_targets_; ++t) {
        for (std::size_t i = 0; i < y.rows(); ++i) {
            targets[t][i] = y(i, t);
        }
    }

    const std::size_t n_trees = static_cast<std::size_t>(config_.n_trees);
    trees_.resize(n_targets_ * n_trees);
    const rng::Stream root(seed, rng::Space::ForestTree);
    parallel_for(trees_.size(), workers, [&](std::size_t slot) {
        const std::size_t target = slot / n_trees;
        std::vector<std::size_t> sample;
        if (config_.bootstrap) {
            rng::Stream stream = root.child(slot);
            sample.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                sample[i] = rows[stream.next_below(rows.size())];
            }
        } else {
            sample = rows;
        }
        trees_[slot] = grow_cart(x, targets[target], sample, config_.max_depth);
    });
}

RandomForestModel::RandomForestModel(RfConfig config, std::size_t n_targets,
                                     std::vector<Tree> trees)
    : config_(config), n_targets_(n_targets), trees_(std::move(trees)) {}

linalg::Matrix RandomForestModel::predict(const linalg::Matrix& x) const {
    check_input(x);
    const std::size_t n_trees = trees_.size() / n_targets_;
    linalg::Matrix out(x.rows(), n_targets_);
    for (std::size_t t = 0; t < n_targets_; ++t) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_trees; ++k) {
                acc += tree_predict(trees_[t * n_trees + k], x, i);
            }
            out(i, t) = acc / static_cast<double>(n_trees);
        }
    }
    return out;
}

nlohmann::json RandomForestModel::hyperparameters() const {
    return {{"n_trees", config_.n_trees},
            {"bootstrap", config_.bootstrap},
            {"max_depth", config_.max_depth}};
}

void RandomForestModel::write_blob(std::ostream& out) const {
    io::write_u32(out, static_cast<std::uint32_t>(config_.n_trees));
    io::write_u32(out, config_.bootstrap ? 1 : 0);
    io::write_u32(out, static_cast<std::uint32_t>(config_.max_depth));
    io::write_u32(out, static_cast<std::uint32_t>(n_targets_));
    io::write_u32(out, static_cast<std::uint32_t>(trees_.size()));
    for (const Tree& t : trees_) {
        write_tree(out, t);
    }
}

} // namespace gms::regression
