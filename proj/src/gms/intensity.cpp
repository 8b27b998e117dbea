#include "gms/intensity.hpp"

#include "gms/error.hpp"

#include <cmath>
#include <numbers>

namespace gms {

namespace detail {

void fft_radix2(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw Error("fft_radix2: size must be a power of two");
    }
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(x[i], x[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace detail

double pga(const GroundMotionRecord& record) {
    record.validate();
    double peak = 0.0;
    for (double a : record.accel) {
        peak = std::max(peak, std::abs(a));
    }
    return peak;
}

double arias_intensity(const GroundMotionRecord& record) {
    record.validate();
    // Trapezoid of a(t)^2 with a converted from g to m/s^2.
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < record.accel.size(); ++i) {
        const double a0 = record.accel[i] * kGravity;
        const double a1 = record.accel[i + 1] * kGravity;
        integral += 0.5 * (a0 * a0 + a1 * a1) * record.dt;
    }
    return std::numbers::pi / (2.0 * kGravity) * integral;
}

double spectral_moment(const GroundMotionRecord& record, int order) {
    record.validate();
    if (order < 0 || order > 2) {
        throw Error("spectral_moment: order must be 0, 1, or 2");
    }
    const std::size_t n = record.accel.size();
    std::size_t n_fft = 1;
    while (n_fft < n) {
        n_fft <<= 1;
    }

    double mean = 0.0;
    for (double a : record.accel) {
        mean += a;
    }
    mean /= static_cast<double>(n);

    std::vector<std::complex<double>> x(n_fft, std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (record.accel[i] - mean) * kGravity; // work in m/s^2
    }
    detail::fft_radix2(x);

    // One-sided periodogram G(w_j) = 2 |X_j|^2 dt / (2 pi N); with
    // dw = 2 pi / (N dt) the product G dw reduces to 2 |X_j|^2 / N^2,
    // which satisfies Parseval over the padded grid.
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n_fft) * record.dt);
    const double norm = 2.0 / (static_cast<double>(n_fft) * static_cast<double>(n_fft));
    double moment = 0.0;
    for (std::size_t j = 1; j <= n_fft / 2; ++j) {
        const double wj = static_cast<double>(j) * dw;
        const double power = std::norm(x[j]) * norm;
        moment += std::pow(wj, order) * power;
    }
    return moment;
}

IMReport im_report(const GroundMotionRecord& record) {
    IMReport r;
    r.record_id = record.id;
    r.pga = pga(record);
    r.arias = arias_intensity(record);
    r.lambda1 = spectral_moment(record, 1);
    return r;
}

std::vector<IMReport> im_table(const SuiteMatrix& suite) {
    std::vector<IMReport> out;
    out.reserve(suite.m());
    for (std::size_t j = 0; j < suite.m(); ++j) {
        out.push_back(im_report(suite.column(j)));
    }
    return out;
}

} // namespace gms
