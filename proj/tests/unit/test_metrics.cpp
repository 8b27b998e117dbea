#include "doctest.h"

#include "gms/error.hpp"
#include "gms/metrics.hpp"

#include <numeric>
#include <vector>

using gms::linalg::Matrix;

namespace {

Matrix column(const std::vector<double>& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(i, 0) = v[i];
    }
    return m;
}

} // namespace

TEST_CASE("perfect predictions score exactly one") {
    const Matrix y = column({0.5, 1.5, -2.0, 4.0});
    const gms::R2 r2 = gms::r2_score(y, y);
    CHECK(r2.per_target[0] == 1.0);
    CHECK(r2.mean == 1.0);
    CHECK(gms::r2_conventional(y, y).mean == 1.0);
}

TEST_CASE("a mean predictor scores exactly zero") {
    // Integer samples with an exactly representable mean make the variance
    // identity hold bitwise, not just approximately.
    const Matrix y = column({0.0, 1.0, 2.0});
    const Matrix yhat = column({1.0, 1.0, 1.0});
    CHECK(gms::r2_score(y, yhat).per_target[0] == 0.0);
    CHECK(gms::r2_conventional(y, yhat).per_target[0] == 0.0);
}

TEST_CASE("variance-ratio hand case scores two thirds") {
    const Matrix y = column({0.0, 1.0, 2.0});
    const Matrix yhat = column({0.0, 1.0, 1.0});
    CHECK(gms::r2_score(y, yhat).per_target[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("a constant bias is invisible to the variance ratio but not to 1 - SSE/SST") {
    const Matrix y = column({0.0, 1.0, 2.0, 3.0});
    Matrix shifted(4, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        shifted(i, 0) = y(i, 0) + 5.0;
    }
    CHECK(gms::r2_score(y, shifted).per_target[0] == 1.0); // residual variance is zero
    CHECK(gms::r2_conventional(y, shifted).per_target[0] < 0.0); // bias dominates SSE
}

TEST_CASE("r2 is per target with the mean across targets") {
    Matrix y(3, 2);
    Matrix yhat(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        y(i, 0) = static_cast<double>(i);
        yhat(i, 0) = y(i, 0);            // perfect
        y(i, 1) = static_cast<double>(i);
        yhat(i, 1) = 1.0;                // mean predictor
    }
    const gms::R2 r2 = gms::r2_score(y, yhat);
    REQUIRE(r2.per_target.size() == 2);
    CHECK(r2.per_target[0] == 1.0);
    CHECK(r2.per_target[1] == 0.0);
    CHECK(r2.mean == 0.5);
}

TEST_CASE("zero-variance targets are rejected") {
    const Matrix y = column({2.0, 2.0, 2.0});
    const Matrix yhat = column({1.0, 2.0, 3.0});
    CHECK_THROWS_AS(gms::r2_score(y, yhat), gms::DegenerateTarget);
    CHECK_THROWS_AS(gms::r2_conventional(y, yhat), gms::DegenerateTarget);
}

TEST_CASE("percentile uses linear interpolation between order statistics") {
    const std::vector<double> v = {4.0, 1.0, 3.0, 2.0}; // unsorted on purpose
    CHECK(gms::percentile(v, 0.0) == 1.0);
    CHECK(gms::percentile(v, 1.0) == 4.0);
    CHECK(gms::percentile(v, 0.5) == doctest::Approx(2.5));
    CHECK(gms::percentile(v, 0.25) == doctest::Approx(1.75));
    CHECK(gms::percentile({7.0}, 0.5) == 7.0);
    CHECK_THROWS_AS(gms::percentile({}, 0.5), gms::Error);
    CHECK_THROWS_AS(gms::percentile({1.0}, 1.5), gms::Error);
}

TEST_CASE("histogram clamps outliers into the end bins and closes the last bin") {
    const std::vector<double> v = {-1.0, 0.1, 0.95, 2.0, 1.0, 0.5, 0.5};
    const gms::Histogram h = gms::equal_width_histogram(v, 2, 0.0, 1.0);
    REQUIRE(h.edges.size() == 3);
    REQUIRE(h.counts.size() == 2);
    CHECK(h.edges[0] == 0.0);
    CHECK(h.edges[1] == doctest::Approx(0.5));
    CHECK(h.edges[2] == 1.0);
    // Below range -> first bin; above range and the exact right edge -> last.
    // 0.5 sits on the shared edge and belongs to the upper bin.
    CHECK(h.counts[0] == 2);
    CHECK(h.counts[1] == 5);
    CHECK(h.counts[0] + h.counts[1] == v.size());
}

TEST_CASE("mean and population variance") {
    CHECK(gms::mean_of({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK(gms::variance_of({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(1.25));
    CHECK(gms::variance_of({5.0, 5.0}) == 0.0);
}
