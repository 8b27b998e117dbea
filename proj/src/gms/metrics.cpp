#include "gms/metrics.hpp"

#include "gms/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gms {

double mean_of(const std::vector<double>& values) {
    double acc = 0.0;
    for (double v : values) {
        acc += v;
    }
    return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

double variance_of(const std::vector<double>& values) {
    if (values.empty()) {
        return 0.0;
    }
    const double mu = mean_of(values);
    double acc = 0.0;
    for (double v : values) {
        acc += (v - mu) * (v - mu);
    }
    return acc / static_cast<double>(values.size());
}

namespace {

void check_shapes(const linalg::Matrix& y, const linalg::Matrix& yhat) {
    if (y.rows() != yhat.rows() || y.cols() != yhat.cols()) {
        throw Error("r2: Y and Yhat shapes differ");
    }
    if (y.rows() == 0 || y.cols() == 0) {
        throw Error("r2: empty inputs");
    }
}

} // namespace

R2 r2_score(const linalg::Matrix& y, const linalg::Matrix& yhat) {
    check_shapes(y, yhat);
    R2 out;
    const std::size_t n = y.rows();
    for (std::size_t t = 0; t < y.cols(); ++t) {
        std::vector<double> target(n);
        std::vector<double> error(n);
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = y(i, t);
            error[i] = y(i, t) - yhat(i, t);
        }
        const double var_y = variance_of(target);
        if (var_y == 0.0) {
            throw DegenerateTarget("r2_score: target " + std::to_string(t) +
                                   " has zero variance");
        }
        out.per_target.push_back(1.0 - variance_of(error) / var_y);
    }
    out.mean = mean_of(out.per_target);
    return out;
}

R2 r2_conventional(const linalg::Matrix& y, const linalg::Matrix& yhat) {
    check_shapes(y, yhat);
    R2 out;
    const std::size_t n = y.rows();
    for (std::size_t t = 0; t < y.cols(); ++t) {
        std::vector<double> target(n);
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = y(i, t);
        }
        const double mu = mean_of(target);
        double sse = 0.0;
        double sst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sse += (y(i, t) - yhat(i, t)) * (y(i, t) - yhat(i, t));
            sst += (y(i, t) - mu) * (y(i, t) - mu);
        }
        if (sst == 0.0) {
            throw DegenerateTarget("r2_conventional: target " + std::to_string(t) +
                                   " has zero variance");
        }
        out.per_target.push_back(1.0 - sse / sst);
    }
    out.mean = mean_of(out.per_target);
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error("percentile: empty input");
    }
    if (!(q >= 0.0) || q > 1.0) {
        throw Error("percentile: q must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Histogram equal_width_histogram(const std::vector<double>& values, std::size_t bins, double lo,
                                double hi) {
    if (bins == 0 || !(hi > lo)) {
        throw Error("equal_width_histogram: need bins >= 1 and hi > lo");
    }
    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + width * static_cast<double>(i);
    }
    h.edges.back() = hi; // guard against accumulated rounding
    h.counts.assign(bins, 0);
    for (double v : values) {
        double pos = (v - lo) / width;
        std::size_t bin = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
        bin = std::min(bin, bins - 1);
        ++h.counts[bin];
    }
    return h;
}

} // namespace gms
