#pragma once

// General-purpose numeric curvature of a metric given on a Cartesian chart
// of R^n.  Derivatives of the metric are central differences; everything
// else is exact algebra.  This is the reference every specialized formula
// in the library is checked against.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/linalg.hpp"
#include "ricci/scalar_fn.hpp"

namespace ricci::tensorlab {

using Point = std::vector<double>;

inline constexpr double kDefaultStep = 1e-3;

/// A metric on a Cartesian chart: x -> g(x), symmetric and invertible.
/// The callable must be reentrant.
struct MetricField {
    std::size_t n = 0;
    std::function<SymMatrix(const Point&)> g;

    SymMatrix operator()(const Point& x) const { return g(x); }
};

/// Christoffel symbols of the second kind, Gamma^k_ij, stored (k, i, j).
class Christoffel {
public:
    Christoffel() = default;
    explicit Christoffel(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t k, std::size_t i, std::size_t j) const { return data_[(k * n_ + i) * n_ + j]; }
    double& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * n_ + i) * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline void check_dimension(const MetricField& mf, const Point& x) {
    if (mf.n < 1 || mf.n > kMaxDimension)
        throw DimensionError("metric dimension " + std::to_string(mf.n) + " outside [1, 8]");
    if (x.size() != mf.n)
        throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, metric expects " +
                             std::to_string(mf.n));
}

inline Point shifted(const Point& x, std::size_t axis, double by) {
    Point y = x;
    y[axis] += by;
    return y;
}

/// Five-point central difference along `axis`:
///   (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / (12 h).
/// Fourth order; samples stay inside the 2h-cube around x.
template <class Fn>
auto central_difference(const Fn& f, const Point& x, std::size_t axis, double h) {
    auto d = f(shifted(x, axis, -2.0 * h)) - f(shifted(x, axis, 2.0 * h));
    d += 8.0 * (f(shifted(x, axis, h)) - f(shifted(x, axis, -h)));
    d *= 1.0 / (12.0 * h);
    return d;
}

/// dg[k](i, j) = d g_ij / d x^k.
inline std::vector<SymMatrix> metric_gradient(const MetricField& mf, const Point& x, double h) {
    std::vector<SymMatrix> dg;
    dg.reserve(mf.n);
    for (std::size_t k = 0; k < mf.n; ++k) dg.push_back(central_difference(mf, x, k, h));
    return dg;
}

} // namespace detail

/// Gamma^t_ij = 1/2 g^{tk} (d_i g_jk + d_j g_ik - d_k g_ij).  Symmetric in
/// the lower indices by construction.
inline Christoffel christoffel(const MetricField& mf, const Point& x, double h = kDefaultStep) {
    detail::check_dimension(mf, x);
    if (!(h > 0.0)) throw PreconditionError("christoffel: step must be positive");
    const std::size_t n = mf.n;
    const SymMatrix ginv = invert_spd(mf(x));
    const auto dg = detail::metric_gradient(mf, x, h);
    Christoffel gamma(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            // lowered symbol [ij, k]
            std::vector<double> lowered(n);
            for (std::size_t k = 0; k < n; ++k) lowered[k] = 0.5 * (dg[i](j, k) + dg[j](i, k) - dg[k](i, j));
            for (std::size_t t = 0; t < n; ++t) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += ginv(t, k) * lowered[k];
                gamma(t, i, j) = s;
                gamma(t, j, i) = s;
            }
        }
    return gamma;
}

/// Ricci tensor in the Christoffel form
///   R_ij = d_s G^s_ij - d_j G^s_is + G^s_ij G^t_st - G^s_it G^t_sj
/// with nested five-point central differences.  The raw result is symmetrized; the
/// largest pre-symmetrization asymmetry is written to `asymmetry` if given.
inline SymMatrix ricci_numeric(const MetricField& mf, const Point& x, double h = kDefaultStep,
                               double* asymmetry = nullptr) {
    detail::check_dimension(mf, x);
    const std::size_t n = mf.n;
    const Christoffel g0 = christoffel(mf, x, h);
    std::vector<Christoffel> dgamma; // dgamma[s](k, i, j) = d_s Gamma^k_ij
    dgamma.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Christoffel p1 = christoffel(mf, detail::shifted(x, s, h), h);
        const Christoffel m1 = christoffel(mf, detail::shifted(x, s, -h), h);
        const Christoffel p2 = christoffel(mf, detail::shifted(x, s, 2.0 * h), h);
        const Christoffel m2 = christoffel(mf, detail::shifted(x, s, -2.0 * h), h);
        Christoffel d(n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    d(k, i, j) = (m2(k, i, j) - p2(k, i, j) + 8.0 * (p1(k, i, j) - m1(k, i, j))) / (12.0 * h);
        dgamma.push_back(std::move(d));
    }
    Matrix full(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double r = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                r += dgamma[s](s, i, j) - dgamma[j](s, i, s);
                for (std::size_t t = 0; t < n; ++t) r += g0(s, i, j) * g0(t, s, t) - g0(s, i, t) * g0(t, s, j);
            }
            full(i, j) = r;
        }
    SymMatrix ric(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            ric(i, j) = 0.5 * (full(i, j) + full(j, i));
            worst = std::max(worst, std::abs(full(i, j) - full(j, i)));
        }
    if (asymmetry) *asymmetry = worst;
    return ric;
}

/// The second-derivative form of the Ricci tensor carrying the
/// 1/(2(n-1)) and 1/(n-1) prefactors:
///   1/(2(n-1)) g^{kl} [d_i d_k g_jl + d_j d_l g_ik - d_i d_j g_kl - d_k d_l g_ij]
///   + 1/(n-1) g^{kl} g_pq [G^p_ik G^q_jl - G^p_ij G^q_kl].
/// Kept only as a normalization diagnostic next to ricci_numeric.
inline SymMatrix ricci_prefactor_form(const MetricField& mf, const Point& x, double h = kDefaultStep) {
    detail::check_dimension(mf, x);
    const std::size_t n = mf.n;
    if (n < 2) throw DimensionError("prefactor form needs n >= 2");
    const SymMatrix g = mf(x);
    const SymMatrix ginv = invert_spd(g);
    const Christoffel gamma = christoffel(mf, x, h);

    // d2g[a][b](i, j) = d_a d_b g_ij
    std::vector<std::vector<SymMatrix>> d2g(n, std::vector<SymMatrix>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            SymMatrix d(n);
            if (a == b) {
                d = mf(detail::shifted(x, a, h)) + mf(detail::shifted(x, a, -h)) - 2.0 * g;
                d *= 1.0 / (h * h);
            } else {
                auto at = [&](double sa, double sb) {
                    Point y = x;
                    y[a] += sa;
                    y[b] += sb;
                    return mf(y);
                };
                d = at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h);
                d *= 1.0 / (4.0 * h * h);
            }
            d2g[a][b] = d;
            d2g[b][a] = d;
        }

    const double c2 = 1.0 / (2.0 * static_cast<double>(n - 1));
    const double c1 = 1.0 / static_cast<double>(n - 1);
    SymMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double second = 0.0;
            double quad = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const double gkl = ginv(k, l);
                    second += gkl * (d2g[i][k](j, l) + d2g[j][l](i, k) - d2g[i][j](k, l) - d2g[k][l](i, j));
                    double q = 0.0;
                    for (std::size_t p = 0; p < n; ++p)
                        for (std::size_t s = 0; s < n; ++s)
                            q += g(p, s) * (gamma(p, i, k) * gamma(s, j, l) - gamma(p, i, j) * gamma(s, k, l));
                    quad += gkl * q;
                }
            r(i, j) = c2 * second + c1 * quad;
        }
    return r;
}

/// Ratio of the prefactor form to the Christoffel form, taken on the
/// largest-magnitude Christoffel-form entry.  NaN when that entry vanishes.
struct NormalizationDiagnostic {
    double ratio = 0.0;
    double christoffel_entry = 0.0;
    double prefactor_entry = 0.0;
};

inline NormalizationDiagnostic ricci_normalization_diagnostic(const MetricField& mf, const Point& x,
                                                              double h = kDefaultStep) {
    const SymMatrix a = ricci_numeric(mf, x, h);
    const SymMatrix b = ricci_prefactor_form(mf, x, h);
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (std::abs(a(i, j)) > std::abs(a(bi, bj))) {
                bi = i;
                bj = j;
            }
    NormalizationDiagnostic d;
    d.christoffel_entry = a(bi, bj);
    d.prefactor_entry = b(bi, bj);
    d.ratio = a(bi, bj) == 0.0 ? std::nan("") : b(bi, bj) / a(bi, bj);
    return d;
}

/// Contraction with the full inverse metric: two symmetric matrices.
inline double trace_with(const SymMatrix& ginv, const SymMatrix& s) {
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) r += ginv(i, j) * s(i, j);
    return r;
}

/// R = g^{ij} R_ij.
inline double scalar_curvature(const MetricField& mf, const Point& x, double h = kDefaultStep) {
    const SymMatrix ric = ricci_numeric(mf, x, h);
    return trace_with(invert_spd(mf(x)), ric);
}

/// In dimension three the curvature tensor is determined by Ricci:
///   R_ijkl = g_ik R_jl - g_il R_jk - g_jk R_il + g_jl R_ik
///            - R/2 (g_ik g_jl - g_il g_jk).
inline Tensor4 riemann_from_ricci_3d(const SymMatrix& ric, const SymMatrix& g) {
    if (ric.size() != 3 || g.size() != 3)
        throw DimensionError("riemann_from_ricci_3d requires n = 3, got " + std::to_string(ric.size()));
    const double scalar = trace_with(invert_spd(g), ric);
    Tensor4 r(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l)
                    r(i, j, k, l) = g(i, k) * ric(j, l) - g(i, l) * ric(j, k) - g(j, k) * ric(i, l) +
                                    g(j, l) * ric(i, k) - 0.5 * scalar * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
    return r;
}

/// Cartesian realization of A(t) dt^2 + B(t) dTheta^2 on R^n \ {0}:
/// with t = |x| and P = x x^T / t^2,  g = A(t) P + (B(t)/t^2)(I - P).
inline MetricField rotsym_to_cartesian(ScalarFn a, ScalarFn b, std::size_t n) {
    if (n < 1 || n > kMaxDimension) throw DimensionError("rotsym_to_cartesian: n outside [1, 8]");
    MetricField mf;
    mf.n = n;
    mf.g = [a = std::move(a), b = std::move(b), n](const Point& x) {
        if (x.size() != n) throw DimensionError("rotsym_to_cartesian: point dimension mismatch");
        double t2 = 0.0;
        for (double xi : x) t2 += xi * xi;
        if (t2 == 0.0) throw DomainError("rotsym_to_cartesian: metric not defined at x = 0");
        const double t = std::sqrt(t2);
        const double av = a.value(t);
        const double bv = b.value(t) / t2;
        SymMatrix g(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double p = x[i] * x[j] / t2;
                g(i, j) = av * p + bv * ((i == j ? 1.0 : 0.0) - p);
            }
        return g;
    };
    return mf;
}

/// Euclidean metric on R^n.
inline MetricField euclidean(std::size_t n) {
    return MetricField{n, [n](const Point&) { return SymMatrix::identity(n); }};
}

/// Orthonormalizes the columns of `basis` with respect to g (Gram-Schmidt,
/// column order preserved).
inline Matrix orthonormal_frame(const SymMatrix& g, const Matrix& basis) {
    const std::size_t n = g.size();
    auto inner = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += u[i] * g(i, j) * v[j];
        return s;
    };
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = basis(i, c);
        for (const auto& u : cols) {
            const double proj = inner(u, v);
            for (std::size_t i = 0; i < n; ++i) v[i] -= proj * u[i];
        }
        const double norm = std::sqrt(inner(v, v));
        if (!(norm > 1e-14)) throw SingularMatrixError("orthonormal_frame: degenerate basis");
        for (double& vi : v) vi /= norm;
        cols.push_back(std::move(v));
    }
    Matrix e(n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < n; ++i) e(i, c) = cols[c][i];
    return e;
}

/// Frame at x != 0 whose first vector is radial, completed by coordinate
/// axes, orthonormalized in g.
inline Matrix radial_frame(const SymMatrix& g, const Point& x) {
    const std::size_t n = x.size();
    Matrix basis(n);
    for (std::size_t i = 0; i < n; ++i) basis(i, 0) = x[i];
    // complete with the coordinate axes least aligned with x
    std::size_t skip = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x[i]) > std::abs(x[skip])) skip = i;
    std::size_t c = 1;
    for (std::size_t axis = 0; axis < n && c < n; ++axis) {
        if (axis == skip) continue;
        basis(axis, c++) = 1.0;
    }
    return orthonormal_frame(g, basis);
}

} // namespace ricci::tensorlab
