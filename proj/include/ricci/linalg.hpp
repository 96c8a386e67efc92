#pragma once

// Small dense containers for curvature work in dimension n <= 8.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ricci/error.hpp"

namespace ricci {

inline constexpr std::size_t kMaxDimension = 8;

/// Symmetric n x n matrix stored as its lower triangle, n(n+1)/2 entries.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

    SymMatrix& operator+=(const SymMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    SymMatrix& operator*=(double s) {
        for (double& x : data_) x *= s;
        return *this;
    }
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    /// Largest absolute entry.
    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    static std::size_t index(std::size_t i, std::size_t j) {
        if (i < j) std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// General dense n x n matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from(const SymMatrix& s) {
        Matrix m(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j) m(i, j) = s(i, j);
        return m;
    }

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    Matrix transpose() const {
        Matrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix c(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k) {
                const double aik = a(i, k);
                for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<double> operator*(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Q^T S Q, the representation of the bilinear form S in the basis given by
/// the columns of Q.
inline SymMatrix congruence(const SymMatrix& s, const Matrix& q) {
    const std::size_t n = s.size();
    SymMatrix r(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) sum += q(i, a) * s(i, j) * q(j, b);
            r(a, b) = sum;
        }
    return r;
}

/// Rank-4 array R(i,j,k,l) with n^4 entries.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * n_ + j) * n_ + k) * n_ + l];
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * n_ + j) * n_ + k) * n_ + l];
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Largest violations of the algebraic curvature-tensor identities.
struct RiemannSymmetryReport {
    double pair_symmetry = 0.0;  // |R_ijkl - R_klij|
    double antisymmetry = 0.0;   // |R_ijkl + R_jikl|
    double first_bianchi = 0.0;  // |R_ijkl + R_iljk + R_iklj|

    double worst() const { return std::max({pair_symmetry, antisymmetry, first_bianchi}); }
};

inline RiemannSymmetryReport check_riemann_symmetries(const Tensor4& r) {
    RiemannSymmetryReport rep;
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const double x = r(i, j, k, l);
                    rep.pair_symmetry = std::max(rep.pair_symmetry, std::abs(x - r(k, l, i, j)));
                    rep.antisymmetry = std::max(rep.antisymmetry, std::abs(x + r(j, i, k, l)));
                    rep.first_bianchi =
                        std::max(rep.first_bianchi, std::abs(x + r(i, l, j, k) + r(i, k, l, j)));
                }
    return rep;
}

/// Inverse of a symmetric invertible matrix by Gauss-Jordan elimination with
/// partial pivoting.  Throws SingularMatrixError when a pivot falls below
/// 1e-14 in magnitude.
inline SymMatrix invert_spd(const SymMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0 || n > kMaxDimension)
        throw DimensionError("invert_spd: dimension " + std::to_string(n) + " outside [1, 8]");
    Matrix a = Matrix::from(m);
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (!(std::abs(a(piv, col)) >= 1e-14))
            throw SingularMatrixError("invert_spd: pivot magnitude below 1e-14 in column " +
                                      std::to_string(col));
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    SymMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) out(i, j) = 0.5 * (inv(i, j) + inv(j, i));
    return out;
}

} // namespace ricci
