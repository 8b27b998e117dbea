#include "gms/linalg.hpp"

#include "gms/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gms::linalg {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw Error("matmul: inner dimensions do not match");
    }
    Matrix c(a.rows(), b.cols());
    // Column-major friendly ordering: accumulate scaled columns of A.
    for (std::size_t j = 0; j < b.cols(); ++j) {
        double* cj = c.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) {
                continue;
            }
            const double* ak = a.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) {
                cj[i] += ak[i] * bkj;
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) {
        throw Error("matvec: dimension mismatch");
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double xj = x[j];
        if (xj == 0.0) {
            continue;
        }
        const double* aj = a.col(j);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            y[i] += aj[i] * xj;
        }
    }
    return y;
}

std::vector<double> matvec_transpose(const Matrix& a, const std::vector<double>& x) {
    if (a.rows() != x.size()) {
        throw Error("matvec_transpose: dimension mismatch");
    }
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double* aj = a.col(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            acc += aj[i] * x[i];
        }
        y[j] = acc;
    }
    return y;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.data()) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

namespace {

double off_diagonal_norm(const Matrix& g) {
    double acc = 0.0;
    const std::size_t n = g.rows();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i != j) {
                acc += g(i, j) * g(i, j);
            }
        }
    }
    return std::sqrt(acc);
}

} // namespace

SymmetricEigen jacobi_eigh(Matrix g, double tol, int max_sweeps) {
    const std::size_t n = g.rows();
    if (g.cols() != n) {
        throw Error("jacobi_eigh: matrix is not square");
    }
    SymmetricEigen result;
    result.vectors = Matrix::identity(n);
    result.values.assign(n, 0.0);
    if (n == 0) {
        return result;
    }

    const double base = frobenius_norm(g);
    if (base == 0.0) {
        return result; // zero matrix: all eigenvalues zero, eigenvectors identity
    }

    Matrix& v = result.vectors;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(g) <= tol * base) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = g(p, q);
                // Entries this far below the convergence threshold cannot
                // prevent termination; zeroing them avoids overflow in tau.
                if (std::abs(apq) <= 1e-18 * base) {
                    g(p, q) = g(q, p) = 0.0;
                    continue;
                }
                const double app = g(p, p);
                const double aqq = g(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                g(p, p) = app - t * apq;
                g(q, q) = aqq + t * apq;
                g(p, q) = g(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) {
                        continue;
                    }
                    const double gip = g(i, p);
                    const double giq = g(i, q);
                    g(i, p) = g(p, i) = c * gip - s * giq;
                    g(i, q) = g(q, i) = s * gip + c * giq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged && off_diagonal_norm(g) > tol * base) {
        throw EigenFailure("jacobi_eigh: no convergence within sweep budget");
    }

    // Sort eigenpairs by descending eigenvalue, keeping the rotation output
    // order for ties so results stay deterministic.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&g](std::size_t a, std::size_t b) { return g(a, a) > g(b, b); });

    Matrix sorted(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        result.values[j] = g(order[j], order[j]);
        const double* src = v.col(order[j]);
        std::copy(src, src + n, sorted.col(j));
    }
    result.vectors = std::move(sorted);
    return result;
}

void orthonormalize_columns(Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < cols; ++j) {
            double* cj = m.col(j);
            for (std::size_t k = 0; k < j; ++k) {
                const double* ck = m.col(k);
                double r = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    r += ck[i] * cj[i];
                }
                for (std::size_t i = 0; i < rows; ++i) {
                    cj[i] -= r * ck[i];
                }
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < rows; ++i) {
                nrm += cj[i] * cj[i];
            }
            nrm = std::sqrt(nrm);
            if (nrm > 0.0) {
                for (std::size_t i = 0; i < rows; ++i) {
                    cj[i] /= nrm;
                }
            }
        }
    }
}

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw Error("solve_dense: dimension mismatch");
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(pivot, k))) {
                pivot = i;
            }
        }
        if (std::abs(a(pivot, k)) < 1e-300) {
            throw Error("solve_dense: matrix is singular");
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(pivot, j));
            }
            std::swap(b[k], b[pivot]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) {
                continue;
            }
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= f * a(k, j);
            }
            b[i] -= f * b[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            acc -= a(i, j) * b[j];
        }
        b[i] = acc / a(i, i);
    }
    return b;
}

} // namespace gms::linalg
