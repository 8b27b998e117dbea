#pragma once

#include "gms/regression/model.hpp"

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms::regression {

struct CvSelection {
    std::size_t best_index = 0;    // position in the candidate grid
    nlohmann::json best;           // canonical hyperparameters of the winner
    double best_mean_r2 = 0.0;
    nlohmann::json table;          // per-candidate fold scores, means, keys
};

/// Deterministic fold assignment: the rows are shuffled once with the
/// (seed, CvFold) stream and cut into k contiguous chunks; the first
/// n mod k folds carry one extra row. Folds partition `rows` exactly.
std::vector<std::vector<std::size_t>> make_folds(const std::vector<std::size_t>& rows,
                                                 std::size_t k, std::uint64_t seed);

/// Complexity key used to break ties between equally scoring candidates:
/// lexicographically smaller means "prefer this model". Per kind:
///   dt   (max_depth)                  with unbounded depth ranked last
///   rf   (n_trees, max_depth)
///   svr  (C, -epsilon, gamma)         smaller box, wider tube, flatter kernel
///   dnn  (hidden_layers * width, hidden_layers, learning_rate)
/// Candidates that still tie keep grid order (earlier wins).
std::vector<double> complexity_key(Kind kind, const nlohmann::json& canonical_hyper);

/// k-fold grid search on the training rows only. Every (candidate, fold)
/// task gets its own derived fit seed, and tasks land in preassigned slots,
/// so the outcome does not depend on the worker count. Scores are the mean
/// over targets of the variance-ratio R^2 on the held-out fold; the winner
/// maximizes the mean score across folds.
CvSelection kfold_grid_search(Kind kind, const linalg::Matrix& x, const linalg::Matrix& y,
                              const std::vector<std::size_t>& train_rows,
                              const std::vector<nlohmann::json>& grid, std::size_t k,
                              std::uint64_t seed, int workers = 0);

} // namespace gms::regression
