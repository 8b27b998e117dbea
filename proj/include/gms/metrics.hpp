#pragma once

#include "gms/linalg.hpp"

#include <cstddef>
#include <vector>

namespace gms {

struct R2 {
    std::vector<double> per_target;
    double mean = 0.0;
};

/// Variance-ratio R^2: 1 - Var(Y - Yhat) / Var(Y) per target, population
/// variances. This is NOT the conventional sum-of-squares R^2: a constant
/// bias in Yhat does not lower it, because Var subtracts the mean error.
/// Throws DegenerateTarget when a target has zero variance.
R2 r2_score(const linalg::Matrix& y, const linalg::Matrix& yhat);

/// Conventional 1 - SSE/SST form, emitted alongside as a labeled diagnostic.
R2 r2_conventional(const linalg::Matrix& y, const linalg::Matrix& yhat);

/// Linear-interpolation percentile (the "type 7" estimator: h = (n-1)q).
/// Values need not be sorted; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct Histogram {
    std::vector<double> edges;       // bins + 1 ascending edges
    std::vector<std::size_t> counts; // per bin; last bin right-inclusive
};

/// Equal-width bins on [lo, hi]. Values outside the range are clamped into
/// the end bins (the range is chosen by the caller to cover the data).
Histogram equal_width_histogram(const std::vector<double>& values, std::size_t bins, double lo,
                                double hi);

double mean_of(const std::vector<double>& values);
/// Population variance (divides by n).
double variance_of(const std::vector<double>& values);

} // namespace gms
