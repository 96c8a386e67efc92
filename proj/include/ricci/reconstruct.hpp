#pragma once

// Metric reconstruction from the Ricci potential:
//
//   r(t) = t exp( int_0^t [phi / ((n-1) w') - 1/s] ds ),
//   f(t) = - int_0^t phi w / ((n-1) w') ds,          f(0) = 0,
//
// and g = e^{2f} (dr^2 + r^2 dTheta^2) with r = r(t).  The integrands have removable
// singularities at s = 0; their limits come from the separatrix series
// (w''(0), w'''(0)) and the jets of phi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/grid.hpp"
#include "ricci/potential.hpp"
#include "ricci/rotsym.hpp"
#include "ricci/scalar_fn.hpp"

namespace ricci::reconstruct {

using potential::PotentialCurve;
using rotsym::MetricProfile;

struct RadialSamples {
    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> rp;
};

struct ConformalSamples {
    std::vector<double> t;
    std::vector<double> f;
    std::vector<double> fp;
};

namespace detail {

struct Quadrature {
    std::vector<double> t, w, p, phi;
};

/// Curve samples with the origin prepended, checked for p phi(0) > 0.
inline Quadrature quadrature_grid(const PotentialCurve& c, const ScalarFn& phi) {
    if (c.size() < 4) throw PreconditionError("reconstruct: curve has fewer than 4 samples");
    const double phi0 = phi.value(0.0);
    Quadrature q;
    q.t.push_back(0.0);
    q.w.push_back(0.0);
    q.p.push_back(0.0);
    q.phi.push_back(phi0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.t[i] == 0.0) continue;
        if (!(c.t[i] > q.t.back())) throw PreconditionError("reconstruct: curve must run forward in t from the origin");
        if (!(c.p[i] * phi0 > 0.0))
            throw NumericalError("reconstruct: sign error, w' phi(0) <= 0 at t = " + std::to_string(c.t[i]));
        q.t.push_back(c.t[i]);
        q.w.push_back(c.w[i]);
        q.p.push_back(c.p[i]);
        q.phi.push_back(phi.value(c.t[i]));
    }
    if (q.t.size() < 5) throw PreconditionError("reconstruct: too few samples away from the origin");
    return q;
}

} // namespace detail

/// r and r' on the curve's grid (origin prepended).  r' = r phi/((n-1) w').
inline RadialSamples solve_r(const PotentialCurve& curve, const ScalarFn& phi, std::size_t n) {
    const auto q = detail::quadrature_grid(curve, phi);
    const double nm1 = static_cast<double>(n - 1);
    const Jet2 phi0 = phi(0.0);
    const double a = curve.series.w2;
    if (!(a != 0.0) || std::abs(phi0.v() / (nm1 * a) - 1.0) > 1e-8)
        throw PreconditionError("solve_r: w''(0) != phi(0)/(n-1), the r-integrand is not regular at 0");
    std::vector<double> integrand(q.t.size());
    integrand[0] = phi0.d1() / phi0.v() - curve.series.w3 / (2.0 * a);
    for (std::size_t i = 1; i < q.t.size(); ++i) integrand[i] = q.phi[i] / (nm1 * q.p[i]) - 1.0 / q.t[i];
    const auto logs = grid::cumulative_integral(q.t, integrand);

    RadialSamples out;
    out.t = q.t;
    out.r.resize(q.t.size());
    out.rp.resize(q.t.size());
    out.r[0] = 0.0;
    out.rp[0] = 1.0;
    for (std::size_t i = 1; i < q.t.size(); ++i) {
        out.r[i] = q.t[i] * std::exp(logs[i]);
        out.rp[i] = out.r[i] * q.phi[i] / (nm1 * q.p[i]);
        if (!(out.rp[i] > 0.0) || !std::isfinite(out.rp[i]))
            throw NumericalError("solve_r: monotonicity lost, r' <= 0 at t = " + std::to_string(q.t[i]));
    }
    return out;
}

/// f and f' on the curve's grid (origin prepended), f(0) = 0.
inline ConformalSamples solve_f(const PotentialCurve& curve, const ScalarFn& phi, std::size_t n) {
    const auto q = detail::quadrature_grid(curve, phi);
    const double nm1 = static_cast<double>(n - 1);
    std::vector<double> integrand(q.t.size());
    integrand[0] = 0.0;
    for (std::size_t i = 1; i < q.t.size(); ++i) integrand[i] = -q.phi[i] * q.w[i] / (nm1 * q.p[i]);
    ConformalSamples out;
    out.t = q.t;
    out.f = grid::cumulative_integral(q.t, integrand);
    out.fp = integrand;
    return out;
}

/// Packs samples into a MetricProfile and checks its invariants
/// (r(0) = 0, r'(0) = 1, f(0) = 0, r' > 0).
inline MetricProfile assemble_metric(const ConformalSamples& f, const RadialSamples& r, std::size_t n) {
    if (f.t != r.t) throw PreconditionError("assemble_metric: f and r samples live on different grids");
    MetricProfile p;
    p.n = n;
    p.grid = r.t;
    p.f = f.f;
    p.fp = f.fp;
    p.r = r.r;
    p.rp = r.rp;
    rotsym::validate(p);
    return p;
}

struct RicciResiduals {
    double res_rr = 0.0;   ///< max |alpha r'^2 - phi|
    double res_thth = 0.0; ///< max |r^2 beta - t^2 psi|
};

/// Pointwise residuals of Ric(g) = T on every profile sample.
struct ResidualSamples {
    std::vector<double> res_rr;
    std::vector<double> res_thth;
};

inline ResidualSamples residual_samples(const MetricProfile& p, const rotsym::RotSymTensor& T) {
    const auto fwd = rotsym::forward_samples(p);
    ResidualSamples out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = p.grid[i];
        out.res_rr.push_back(std::abs(fwd.alpha[i] * p.rp[i] * p.rp[i] - T.phi.value(t)));
        out.res_thth.push_back(std::abs(p.r[i] * p.r[i] * fwd.beta[i] - t * t * T.psi.value(t)));
    }
    return out;
}

/// Maximum residuals over the profile samples in [t_lo, t_hi].
inline RicciResiduals verify_ricci(const MetricProfile& p, const rotsym::RotSymTensor& T, double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw PreconditionError("verify_ricci: require 0 < t_lo < t_hi");
    const auto res = residual_samples(p, T);
    RicciResiduals out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = p.grid[i];
        if (t < t_lo || t > t_hi) continue;
        out.res_rr = std::max(out.res_rr, res.res_rr[i]);
        out.res_thth = std::max(out.res_thth, res.res_thth[i]);
    }
    return out;
}

/// w = -r f'/r'.
inline std::vector<double> ricci_potential_from_profile(const MetricProfile& p) {
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = -p.r[i] * p.fp[i] / p.rp[i];
    return w;
}

struct ReconstructionResult {
    MetricProfile profile;
    std::vector<double> w; ///< potential on the profile grid
    std::vector<double> p; ///< w' on the profile grid
    double residual_r = 0.0;  ///< max |(n-1) w' r' - phi r|, r' by differencing r
    double residual_f = 0.0;  ///< max |(n-1) w' f' + w phi|
    RicciResiduals ricci;     ///< over [t_lo, t_max]
};

/// Full reconstruction from a potential curve, with residual checks.
/// t_lo = 0 selects the default 0.05 * (last sample).
inline ReconstructionResult reconstruct(const PotentialCurve& curve, const rotsym::RotSymTensor& T, double t_lo = 0.0) {
    const std::size_t n = T.n;
    const auto r = solve_r(curve, T.phi, n);
    const auto f = solve_f(curve, T.phi, n);
    ReconstructionResult out;
    out.profile = assemble_metric(f, r, n);
    const auto q = detail::quadrature_grid(curve, T.phi);
    out.w = q.w;
    out.p = q.p;

    const double nm1 = static_cast<double>(n - 1);
    const auto rp_fd = grid::derivative(r.t, r.r);
    for (std::size_t i = 0; i < q.t.size(); ++i) {
        out.residual_r = std::max(out.residual_r, std::abs(nm1 * q.p[i] * rp_fd[i] - q.phi[i] * r.r[i]));
        out.residual_f = std::max(out.residual_f, std::abs(nm1 * q.p[i] * f.fp[i] + q.w[i] * q.phi[i]));
    }
    const double t_hi = q.t.back();
    if (t_lo == 0.0) t_lo = 0.05 * t_hi;
    out.ricci = verify_ricci(out.profile, T, t_lo, t_hi);
    return out;
}

} // namespace ricci::reconstruct
