#pragma once

#include "gms/regression/tree.hpp"

#include <cstdint>

namespace gms::regression {

struct RfConfig {
    int n_trees = 250;
    bool bootstrap = true; // test hook: false trains every tree on all rows
    int max_depth = -1;    // unbounded by default
};

/// Bagged ensemble of unconstrained CART trees: each tree fits a bootstrap
/// resample (with replacement, same size) and predictions average over the
/// ensemble. All features are candidates at every split; there is no feature
/// subsampling, so with bootstrap off every tree is identical to the plain
/// decision tree. Trees are built in parallel into fixed slots with per-tree
/// substreams, so results do not depend on the worker count.
class RandomForestModel final : public Regressor {
public:
    RandomForestModel(const linalg::Matrix& x, const linalg::Matrix& y,
                      const std::vector<std::size_t>& rows, const RfConfig& config,
                      std::uint64_t seed, int workers);
    RandomForestModel(RfConfig config, std::size_t n_targets, std::vector<Tree> trees);

    Kind kind() const override { return Kind::RandomForest; }
    linalg::Matrix predict(const linalg::Matrix& x) const override;
    nlohmann::json hyperparameters() const override;
    void write_blob(std::ostream& out) const override;

private:
    RfConfig config_;
    std::size_t n_targets_ = 0;
    std::vector<Tree> trees_; // [target * n_trees + tree]
};

} // namespace gms::regression
