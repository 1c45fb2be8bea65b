#include "idfunc/linalg.hpp"

#include <cmath>
#include <limits>

namespace idfunc {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw DimensionMismatchError("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Matrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw DimensionMismatchError("Matrix::from_rows: ragged rows");
        int j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Matrix::col(int j) const {
    Vec v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Matrix::set_col(int j, const Vec& v) {
    if (static_cast<int>(v.size()) != rows_)
        throw DimensionMismatchError("Matrix::set_col: size mismatch");
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Vec operator*(const Matrix& m, const Vec& v) {
    if (m.cols() != static_cast<int>(v.size()))
        throw DimensionMismatchError("matrix * vector: size mismatch");
    Vec out(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatchError("matrix * matrix: size mismatch");
    Matrix out(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int l = 0; l < a.cols(); ++l) {
            const double ail = a(i, l);
            for (int j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
        }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatchError("matrix - matrix: size mismatch");
    Matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

double max_abs(const Matrix& m) {
    double v = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v = std::max(v, std::abs(m(i, j)));
    return v;
}

double determinant(Matrix m) {
    if (!m.square()) throw DimensionMismatchError("determinant: matrix not square");
    const int n = m.rows();
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            det = -det;
        }
        det *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

Vec solve(Matrix a, Vec b) {
    Matrix rhs(static_cast<int>(b.size()), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i), 0) = b[i];
    Matrix x = solve(std::move(a), rhs);
    Vec out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(static_cast<int>(i), 0);
    return out;
}

Matrix solve(Matrix a, const Matrix& b) {
    if (!a.square() || a.rows() != b.rows())
        throw DimensionMismatchError("solve: dimension mismatch");
    const int n = a.rows();
    const int m = b.cols();
    Matrix x = b;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw SingularMatrixError("solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            for (int j = 0; j < m; ++j) std::swap(x(piv, j), x(k, j));
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < m; ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < m; ++j) {
            double s = x(k, j);
            for (int l = k + 1; l < n; ++l) s -= a(k, l) * x(l, j);
            x(k, j) = s / a(k, k);
        }
    }
    return x;
}

SymmetricEigen eigen_symmetric(Matrix a) {
    if (!a.square()) throw DimensionMismatchError("eigen_symmetric: matrix not square");
    const int n = a.rows();
    Matrix v = Matrix::identity(n);

    auto off_diag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double stop = std::max(scale, 1.0) * 1e-15;

    for (int sweep = 0; sweep < 64 && off_diag() > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= stop * 1e-2) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

double condition_number(const Matrix& a) {
    if (!a.square()) throw DimensionMismatchError("condition_number: matrix not square");
    const Matrix ata = a.transposed() * a;
    SymmetricEigen eig = eigen_symmetric(ata);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double lambda : eig.values) {
        lambda = std::max(lambda, 0.0);
        lo = std::min(lo, lambda);
        hi = std::max(hi, lambda);
    }
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

double box_distance(const Vec& x, std::span<const Interval> box) {
    if (x.size() != box.size()) throw DimensionMismatchError("box_distance: size mismatch");
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, box[j].distance(x[j]));
    return d;
}

double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace idfunc
