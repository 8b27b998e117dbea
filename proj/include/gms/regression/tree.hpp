#pragma once

#include "gms/regression/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gms::regression {

/// Flat CART regression tree. feature == -1 marks a leaf carrying `value`;
/// interior nodes send x[feature] <= threshold left, else right.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

using Tree = std::vector<TreeNode>;

/// Grow a CART tree on the given rows of (x, y): exhaustive best split by
/// SSE reduction over midpoints of consecutive distinct sorted feature
/// values; leaves predict the row mean. Stops at max_depth (< 0 means
/// unbounded), fewer than 2 rows, zero variance, or no strictly improving
/// split. Ties go to the lowest feature index, then the lowest threshold.
Tree grow_cart(const linalg::Matrix& x, const std::vector<double>& y,
               const std::vector<std::size_t>& rows, int max_depth);

double tree_predict(const Tree& tree, const linalg::Matrix& x, std::size_t row);

std::size_t tree_depth(const Tree& tree);

void write_tree(std::ostream& out, const Tree& tree);
Tree read_tree(std::istream& in);

struct DtConfig {
    int max_depth = -1; // < 0: unbounded
};

class DecisionTreeModel final : public Regressor {
public:
    DecisionTreeModel(const linalg::Matrix& x, const linalg::Matrix& y,
                      const std::vector<std::size_t>& rows, const DtConfig& config);
    /// Deserialization constructor.
    DecisionTreeModel(DtConfig config, std::vector<Tree> trees);

    Kind kind() const override { return Kind::DecisionTree; }
    linalg::Matrix predict(const linalg::Matrix& x) const override;
    nlohmann::json hyperparameters() const override;
    void write_blob(std::ostream& out) const override;

    const Tree& target_tree(std::size_t t) const { return trees_[t]; }

private:
    DtConfig config_;
    std::vector<Tree> trees_; // one per target
};

} // namespace gms::regression
