#pragma once

#include <cstddef>
#include <vector>

namespace gms::linalg {

/// Dense column-major matrix of doubles. Column-major because the suites
/// store one record per column and the SVD works column-wise.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

    double* col(std::size_t j) { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const { return data_.data() + j * rows_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::vector<double> row_copy(std::size_t i) const {
        std::vector<double> r(cols_);
        for (std::size_t j = 0; j < cols_; ++j) {
            r[j] = (*this)(i, j);
        }
        return r;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// y = A x
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
/// y = A^T x
std::vector<double> matvec_transpose(const Matrix& a, const std::vector<double>& x);

double frobenius_norm(const Matrix& a);
double norm2(const std::vector<double>& v);
double norm_inf(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);

/// Eigendecomposition of a symmetric matrix, eigenvalues descending and
/// eigenvectors in matching column order.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

/// Cyclic Jacobi rotations. Converges when the off-diagonal Frobenius norm
/// drops below tol relative to the norm of the input; throws EigenFailure
/// if max_sweeps full sweeps are not enough.
SymmetricEigen jacobi_eigh(Matrix g, double tol = 1e-14, int max_sweeps = 100);

/// Two passes of modified Gram-Schmidt. One pass leaves O(eps*cond) residual
/// coupling between columns; the second pass reduces it to machine precision.
void orthonormalize_columns(Matrix& m);

/// Solve A x = b by partial-pivot LU. Intended for the small Newton systems
/// (a handful of DoFs), not for anything suite-sized.
std::vector<double> solve_dense(Matrix a, std::vector<double> b);

} // namespace gms::linalg
