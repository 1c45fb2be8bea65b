#pragma once

#include <initializer_list>

#include "idfunc/base.hpp"

namespace idfunc {

/// Dense row-major matrix. Everything in this library is k x k with
/// k <= 2, so no effort is spent on blocking or views.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0);
    static Matrix identity(int n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    Matrix transposed() const;
    Vec col(int j) const;
    void set_col(int j, const Vec& v);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Vec operator*(const Matrix& m, const Vec& v);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& m);

/// Determinant by LU with partial pivoting.
double determinant(Matrix m);

/// Solve A x = b (Gaussian elimination, partial pivoting). Throws
/// SingularMatrixError when a pivot vanishes.
Vec solve(Matrix a, Vec b);

/// Solve A X = B columnwise.
Matrix solve(Matrix a, const Matrix& b);

/// Symmetric eigendecomposition A = V diag(values) V^T by cyclic Jacobi
/// rotations. `a` must be symmetric.
struct SymmetricEigen {
    Vec values;
    Matrix vectors;  // columns are eigenvectors
};
SymmetricEigen eigen_symmetric(Matrix a);

/// 2-norm condition number, computed from the symmetric eigenvalues of
/// A^T A. Returns +inf for a singular matrix.
double condition_number(const Matrix& a);

}  // namespace idfunc
