#pragma once

#include "gms/ground_motion.hpp"

#include <complex>
#include <string>
#include <vector>

namespace gms {

/// Intensity measures of a single record, used to compare generated or
/// reconstructed motions against originals.
struct IMReport {
    std::string record_id;
    double pga = 0.0;     // g
    double arias = 0.0;   // m/s
    double lambda1 = 0.0; // first spectral moment, (rad/s) * (m/s^2)^2 density units
};

/// max |a(t)| in g.
double pga(const GroundMotionRecord& record);

/// Arias intensity IA = pi/(2 g0) * integral of a(t)^2 dt, a in m/s^2,
/// trapezoidal rule on the record grid. Result in m/s.
double arias_intensity(const GroundMotionRecord& record);

/// Spectral moment lambda_k = sum_j w_j^k G(w_j) dw over the one-sided
/// periodogram of the acceleration in m/s^2 (rad/s frequencies, DC bin
/// excluded). The record is mean-detrended and zero-padded to a power of
/// two; the normalization is over the padded grid, so moments are
/// comparable across records sharing that grid.
double spectral_moment(const GroundMotionRecord& record, int order);

IMReport im_report(const GroundMotionRecord& record);
std::vector<IMReport> im_table(const SuiteMatrix& suite);

namespace detail {

/// In-place iterative radix-2 Cooley-Tukey; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& x);

} // namespace detail

} // namespace gms
