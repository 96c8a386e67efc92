#pragma once

// Rotationally symmetric graphs y_{n+1} = h(y_1^2 + ... + y_n^2) in R^{n+1}.
// With u = r^2 the induced metric is f(r) dr^2 + r^2 dTheta^2 where
// f(r) = 1 + 4 r^2 h'(u)^2.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/linalg.hpp"
#include "ricci/scalar_fn.hpp"
#include "ricci/tensorlab.hpp"

namespace ricci::hypersurface {

struct GraphEmbedding {
    std::size_t n = 3;
    ScalarFn h; ///< profile as a function of u = r^2
    double r_max = 1.0;
};

struct InducedMetric {
    double f_val = 1.0;
    double g_rr = 1.0;
    double g_thth = 0.0; ///< coefficient of dTheta^2
};

namespace detail {

/// f(r) and f'(r).
inline std::pair<double, double> warp(const GraphEmbedding& E, double r) {
    const Jet2 h = E.h(r * r);
    const double h1 = h.d1();
    const double h2 = h.d2();
    const double f = 1.0 + 4.0 * r * r * h1 * h1;
    const double fp = 8.0 * r * h1 * h1 + 16.0 * r * r * r * h1 * h2;
    return {f, fp};
}

} // namespace detail

inline InducedMetric induced_metric(const GraphEmbedding& E, double r) {
    if (r < 0.0) throw PreconditionError("induced_metric: r must be non-negative");
    const auto [f, fp] = detail::warp(E, r);
    (void)fp;
    return {f, f, r * r};
}

enum class TangentialFormula {
    Corrected, ///< r f'/(2 f^2) - (n-2)/f + (n-2)
    PlusTwo,   ///< r f'/(2 f^2) - (n+2)/f + (n-2); not zero on flat space
};

struct GraphRicci {
    double ric_rr = 0.0;
    double ric_thth_unit = 0.0; ///< coefficient of dTheta^2
};

/// Ricci of the induced metric:
///   Ric_rr = (n-1) f'/(2 r f),
///   Ric_thth = r f'/(2 f^2) - (n-2)/f + (n-2)   (per unit-sphere direction).
/// Both are written without division by r, so r = 0 is covered.
inline GraphRicci ricci_graph(const GraphEmbedding& E, double r,
                              TangentialFormula formula = TangentialFormula::Corrected) {
    if (r < 0.0) throw PreconditionError("ricci_graph: r must be non-negative");
    const Jet2 h = E.h(r * r);
    const double h1 = h.d1();
    const double h2 = h.d2();
    const double n = static_cast<double>(E.n);
    const auto [f, fp] = detail::warp(E, r);
    GraphRicci out;
    // f'/r = 8 h'^2 + 16 r^2 h' h''
    out.ric_rr = (n - 1.0) * (8.0 * h1 * h1 + 16.0 * r * r * h1 * h2) / (2.0 * f);
    const double radial = r * fp / (2.0 * f * f);
    if (formula == TangentialFormula::Corrected)
        out.ric_thth_unit = radial + (n - 2.0) * (f - 1.0) / f;
    else
        out.ric_thth_unit = radial - (n + 2.0) / f + (n - 2.0);
    return out;
}

/// h_1 = (2h' + 4 r^2 h'') / f^{3/2},  h_2 = ... = h_n = 2h' / f^{1/2}.
inline std::vector<double> principal_curvatures(const GraphEmbedding& E, double r) {
    if (r < 0.0) throw PreconditionError("principal_curvatures: r must be non-negative");
    const Jet2 h = E.h(r * r);
    const double f = 1.0 + 4.0 * r * r * h.d1() * h.d1();
    std::vector<double> k(E.n, 2.0 * h.d1() / std::sqrt(f));
    k[0] = (2.0 * h.d1() + 4.0 * r * r * h.d2()) / (f * std::sqrt(f));
    return k;
}

struct GaussCurvatures {
    Tensor4 riemann;       ///< R_ijkl = h_i h_j (d_ik d_jl - d_jk d_il)
    SymMatrix ricci_frame; ///< R_ij = d_ij [h_i sum(h) - h_i^2]
    double scalar = 0.0;   ///< (sum h)^2 - sum h^2
};

/// Curvature in the orthonormal principal frame from the Gauss equation.
inline GaussCurvatures gauss_curvatures(const std::vector<double>& k) {
    const std::size_t n = k.size();
    if (n < 2) throw DimensionError("gauss_curvatures: need at least two principal curvatures");
    GaussCurvatures out;
    out.riemann = Tensor4(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            out.riemann(i, j, i, j) = k[i] * k[j];
            out.riemann(i, j, j, i) = -k[i] * k[j];
        }
    // contractions of the tensor itself, so the three stay consistent
    out.ricci_frame = SymMatrix(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l <= j; ++l) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += out.riemann(i, j, i, l);
            out.ricci_frame(j, l) = s;
        }
    for (std::size_t i = 0; i < n; ++i) out.scalar += out.ricci_frame(i, i);
    return out;
}

/// The induced metric on the Cartesian chart, pulled back from R^{n+1}:
/// g_ij = d_ij + 4 h'(u)^2 y_i y_j.
inline tensorlab::MetricField cartesian_metric(const GraphEmbedding& E) {
    const std::size_t n = E.n;
    const ScalarFn h = E.h;
    return tensorlab::MetricField{n, [n, h](const tensorlab::Point& y) {
                                      double u = 0.0;
                                      for (double yi : y) u += yi * yi;
                                      const double hp = h(u).d1();
                                      SymMatrix g = SymMatrix::identity(n);
                                      for (std::size_t i = 0; i < n; ++i)
                                          for (std::size_t j = 0; j <= i; ++j) g(i, j) += 4.0 * hp * hp * y[i] * y[j];
                                      return g;
                                  }};
}

} // namespace ricci::hypersurface
