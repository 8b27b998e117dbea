#include "gms/regression/tree.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace gms::regression {

namespace {

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double children_sse = 0.0;
};

double node_sse(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
    double s = 0.0;
    double q = 0.0;
    for (std::size_t r : rows) {
        s += y[r];
        q += y[r] * y[r];
    }
    const double n = static_cast<double>(rows.size());
    return std::max(0.0, q - s * s / n);
}

/// Exhaustive scan for the SSE-minimizing axis split. For each feature the
/// rows are sorted by value and a prefix-sum sweep prices every boundary
/// between distinct values in O(n).
SplitChoice best_split(const linalg::Matrix& x, const std::vector<double>& y,
                       const std::vector<std::size_t>& rows) {
    SplitChoice best;
    double best_sse = std::numeric_limits<double>::infinity();
    const std::size_t n = rows.size();

    std::vector<std::size_t> sorted(rows);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(a, f);
            const double vb = x(b, f);
            return va < vb || (va == vb && a < b);
        });
        double left_s = 0.0;
        double left_q = 0.0;
        double total_s = 0.0;
        double total_q = 0.0;
        for (std::size_t r : sorted) {
            total_s += y[r];
            total_q += y[r] * y[r];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double yi = y[sorted[i]];
            left_s += yi;
            left_q += yi * yi;
            const double vi = x(sorted[i], f);
            const double vnext = x(sorted[i + 1], f);
            if (vi == vnext) {
                continue; // can only cut between distinct values
            }
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double sse_l = left_q - left_s * left_s / nl;
            const double sse_r = (total_q - left_q) - (total_s - left_s) * (total_s - left_s) / nr;
            const double sse = std::max(0.0, sse_l) + std::max(0.0, sse_r);
            // Strictly-better keeps the first (lowest feature, lowest
            // threshold) among ties, making the tree deterministic.
            if (sse < best_sse) {
                best_sse = sse;
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (vi + vnext);
                best.children_sse = sse;
            }
        }
    }
    return best;
}

struct Builder {
    const linalg::Matrix& x;
    const std::vector<double>& y;
    int max_depth;
    Tree tree;

    std::int32_t build(std::vector<std::size_t> rows, int depth) {
        const std::int32_t id = static_cast<std::int32_t>(tree.size());
        tree.emplace_back();

        double mean = 0.0;
        for (std::size_t r : rows) {
            mean += y[r];
        }
        mean /= static_cast<double>(rows.size());
        tree[id].value = mean;

        const bool depth_capped = max_depth >= 0 && depth >= max_depth;
        if (rows.size() < 2 || depth_capped || node_sse(y, rows) <= 1e-12) {
            return id;
        }
        const SplitChoice split = best_split(x, y, rows);
        if (!split.found || split.children_sse >= node_sse(y, rows)) {
            return id; // no strictly improving cut
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (std::size_t r : rows) {
            (x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree[id].feature = static_cast<std::int32_t>(split.feature);
        tree[id].threshold = split.threshold;
        const std::int32_t left = build(std::move(left_rows), depth + 1);
        tree[id].left = left;
        const std::int32_t right = build(std::move(right_rows), depth + 1);
        tree[id].right = right;
        return id;
    }
};

} // namespace

Tree grow_cart(const linalg::Matrix& x, const std::vector<double>& y,
               const std::vector<std::size_t>& rows, int max_depth) {
    if (rows.empty()) {
        throw Error("grow_cart: no rows");
    }
    Builder b{x, y, max_depth, {}};
    b.build(rows, 0);
    return std::move(b.tree);
}

double tree_predict(const Tree& tree, const linalg::Matrix& x, std::size_t row) {
    std::int32_t node = 0;
    while (tree[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = tree[static_cast<std::size_t>(node)];
        node = x(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return tree[static_cast<std::size_t>(node)].value;
}

std::size_t tree_depth(const Tree& tree) {
    // Depth by walking parents breadth-first; the tree is stored pre-order
    // so a simple stack of (node, depth) suffices.
    std::size_t max_depth = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        const TreeNode& n = tree[static_cast<std::size_t>(id)];
        if (n.feature >= 0) {
            stack.push_back({n.left, depth + 1});
            stack.push_back({n.right, depth + 1});
        }
    }
    return max_depth;
}

void write_tree(std::ostream& out, const Tree& tree) {
    io::write_u32(out, static_cast<std::uint32_t>(tree.size()));
    for (const TreeNode& n : tree) {
        io::write_u32(out, static_cast<std::uint32_t>(n.feature));
        io::write_f64(out, n.threshold);
        io::write_u32(out, static_cast<std::uint32_t>(n.left));
        io::write_u32(out, static_cast<std::uint32_t>(n.right));
        io::write_f64(out, n.value);
    }
}

Tree read_tree(std::istream& in) {
    const std::size_t count = io::read_u32(in);
    Tree tree(count);
    for (TreeNode& n : tree) {
        n.feature = static_cast<std::int32_t>(io::read_u32(in));
        n.threshold = io::read_f64(in);
        n.left = static_cast<std::int32_t>(io::read_u32(in));
        n.right = static_cast<std::int32_t>(io::read_u32(in));
        n.value = io::read_f64(in);
    }
    return tree;
}

DecisionTreeModel::DecisionTreeModel(const linalg::Matrix& x, const linalg::Matrix& y,
                                     const std::vector<std::size_t>& rows,
                                     const DtConfig& config)
    : config_(config) {
    if (rows.size() < 2) {
        throw Error("fit_dt: need at least 2 samples");
    }
    input_dim_ = x.cols();
    x_stats_.fit(x, rows);
    y_stats_.fit(y, rows);
    for (std::size_t t = 0; t < y.cols(); ++t) {
        std::vector<double> target(y.rows());
        for (std::size_t i = 0; i < y.rows(); ++i) {
            target[i] = y(i, t);
        }
        trees_.push_back(grow_cart(x, target, rows, config_.max_depth));
    }
}

DecisionTreeModel::DecisionTreeModel(DtConfig config, std::vector<Tree> trees)
    : config_(config), trees_(std::move(trees)) {}

linalg::Matrix DecisionTreeModel::predict(const linalg::Matrix& x) const {
    check_input(x);
    linalg::Matrix out(x.rows(), trees_.size());
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            out(i, t) = tree_predict(trees_[t], x, i);
        }
    }
    return out;
}

nlohmann::json DecisionTreeModel::hyperparameters() const {
    return {{"max_depth", config_.max_depth}};
}

void DecisionTreeModel::write_blob(std::ostream& out) const {
    io::write_u32(out, static_cast<std::uint32_t>(config_.max_depth));
    io::write_u32(out, static_cast<std::uint32_t>(trees_.size()));
    for (const Tree& t : trees_) {
        write_tree(out, t);
    }
}

} // namespace gms::regression
