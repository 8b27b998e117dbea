#include "gms/regression/cv.hpp"

#include "gms/error.hpp"
#include "gms/metrics.hpp"
#include "gms/parallel.hpp"
#include "gms/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gms::regression {

std::vector<std::vector<std::size_t>> make_folds(const std::vector<std::size_t>& rows,
                                                 std::size_t k, std::uint64_t seed) {
    if (k < 2) {
        throw ConfigError("cross-validation needs k >= 2");
    }
    if (rows.size() < k) {
        throw ConfigError("cross-validation needs at least k rows (" + std::to_string(rows.size()) +
                          " rows for k = " + std::to_string(k) + ")");
    }
    std::vector<std::size_t> shuffled = rows;
    rng::Stream stream(seed, rng::Space::CvFold);
    stream.shuffle(shuffled);

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = shuffled.size() / k;
    const std::size_t extra = shuffled.size() % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(shuffled.begin() + pos, shuffled.begin() + pos + len);
        pos += len;
    }
    return folds;
}

std::vector<double> complexity_key(Kind kind, const nlohmann::json& h) {
    const auto depth_rank = [&](const char* key) {
        const int d = h.at(key).get<int>();
        return d < 0 ? 1e300 : static_cast<double>(d);
    };
    switch (kind) {
    case Kind::DecisionTree:
        return {depth_rank("max_depth")};
    case Kind::RandomForest:
        return {h.at("n_trees").get<double>(), depth_rank("max_depth")};
    case Kind::Svr:
        return {h.at("C").get<double>(), -h.at("epsilon").get<double>(),
                h.at("gamma").get<double>()};
    case Kind::Dnn: {
        const double layers = h.at("hidden_layers").get<double>();
        const double width = h.at("width").get<double>();
        return {layers * width, layers, h.at("learning_rate").get<double>()};
    }
    }
    throw Error("unknown model kind");
}

CvSelection kfold_grid_search(Kind kind, const linalg::Matrix& x, const linalg::Matrix& y,
                              const std::vector<std::size_t>& train_rows,
                              const std::vector<nlohmann::json>& grid, std::size_t k,
                              std::uint64_t seed, int workers) {
    if (grid.empty()) {
        throw ConfigError("hyperparameter grid is empty");
    }
    const auto folds = make_folds(train_rows, k, seed);

    struct TaskResult {
        double score = 0.0;
        nlohmann::json canonical; // filled by fold 0 only
    };
    std::vector<TaskResult> results(grid.size() * k);

    parallel_for(results.size(), workers, [&](std::size_t task) {
        const std::size_t g = task / k;
        const std::size_t f = task % k;

        std::vector<std::size_t> fit_rows;
        fit_rows.reserve(train_rows.size() - folds[f].size());
        for (std::size_t other = 0; other < k; ++other) {
            if (other != f) {
                fit_rows.insert(fit_rows.end(), folds[other].begin(), folds[other].end());
            }
        }

        rng::Stream task_stream(seed, rng::Space::CvFold, 1 + task);
        const std::uint64_t fit_seed = task_stream.next_u64();
        const auto model = fit(kind, x, y, fit_rows, grid[g], fit_seed);

        const linalg::Matrix truth = gather_rows(y, folds[f]);
        const linalg::Matrix pred = predict_rows(*model, x, folds[f]);
        results[task].score = r2_score(truth, pred).mean;
        if (f == 0) {
            results[task].canonical = model->hyperparameters();
        }
    });

    CvSelection sel;
    sel.table = nlohmann::json::array();
    bool have_best = false;
    std::vector<double> best_key;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> fold_scores(k);
        double mean = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            fold_scores[f] = results[g * k + f].score;
            mean += fold_scores[f];
        }
        mean /= static_cast<double>(k);
        const nlohmann::json& canonical = results[g * k].canonical;
        const std::vector<double> key = complexity_key(kind, canonical);

        sel.table.push_back({{"index", g},
                             {"hyperparameters", canonical},
                             {"fold_r2", fold_scores},
                             {"mean_r2", mean},
                             {"complexity_key", key}});

        const bool better =
            !have_best || mean > sel.best_mean_r2 ||
            (mean == sel.best_mean_r2 && std::lexicographical_compare(key.begin(), key.end(),
                                                                      best_key.begin(),
                                                                      best_key.end()));
        if (better) {
            have_best = true;
            sel.best_index = g;
            sel.best = canonical;
            sel.best_mean_r2 = mean;
            best_key = key;
        }
    }
    return sel;
}

} // namespace gms::regression
