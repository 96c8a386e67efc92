#pragma once

// Rotationally symmetric tensors T = phi(t) dt^2 + t^2 psi(t) dTheta^2 and
// metrics g = 2 e^{f(t)} [r'(t) dt^2 + r(t)^2 dTheta^2] on R^n, with the
// forward Ricci map (f, r) -> (alpha, beta):
//
//   alpha = -(n-1) [f_rr + f_r / r]
//   beta  = -[f_rr + (2n-3) f_r / r + (n-2) f_r^2]
//   f_r = f'/r',  f_rr = (f_r)'/r'
//
// and the pullback phi = alpha r'^2, t^2 psi = r^2 beta.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/expr.hpp"
#include "ricci/grid.hpp"
#include "ricci/jet.hpp"
#include "ricci/scalar_fn.hpp"
#include "ricci/tensorlab.hpp"

namespace ricci::rotsym {

struct RotSymTensor {
    std::size_t n = 3;
    ScalarFn phi;
    ScalarFn psi;
    double t_max = 1.0;
};

// ---------------------------------------------------------------------------
// Definiteness

enum class DefinitenessKind { PositiveDefinite, NegativeDefinite, Singular, Inconsistent };

struct Definiteness {
    DefinitenessKind kind = DefinitenessKind::PositiveDefinite;
    double t_star = 0.0; // Singular: first degenerate point
    double phi0 = 0.0;
    double psi0 = 0.0;
    std::string reason;

    bool nonsingular() const {
        return kind == DefinitenessKind::PositiveDefinite || kind == DefinitenessKind::NegativeDefinite;
    }
};

inline const char* to_string(DefinitenessKind k) {
    switch (k) {
    case DefinitenessKind::PositiveDefinite: return "PositiveDefinite";
    case DefinitenessKind::NegativeDefinite: return "NegativeDefinite";
    case DefinitenessKind::Singular: return "Singular";
    case DefinitenessKind::Inconsistent: return "Inconsistent";
    }
    return "?";
}

namespace detail {

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

/// Refines a sign change of fn on [lo, hi] (fn(lo) has sign `s0` != 0,
/// fn(hi) does not) down to width 1e-10.
template <class Fn>
double bisect_sign_loss(const Fn& fn, double lo, double hi, int s0) {
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (sign_of(fn(mid)) == s0) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace detail

/// Scans phi and psi on a uniform grid over [0, t_max].  A nonsingular
/// tensor keeps one sign throughout and has phi(0) = psi(0).
inline Definiteness definiteness_check(const RotSymTensor& T, std::size_t grid_size = 256) {
    if (grid_size < 16) throw PreconditionError("definiteness_check: grid_size must be at least 16");
    if (!(T.t_max > 0.0)) throw PreconditionError("definiteness_check: t_max must be positive");
    Definiteness d;
    d.phi0 = T.phi.value(0.0);
    d.psi0 = T.psi.value(0.0);
    if (d.phi0 == 0.0 || d.psi0 == 0.0 || detail::sign_of(d.phi0) != detail::sign_of(d.psi0)) {
        d.kind = DefinitenessKind::Singular;
        d.t_star = 0.0;
        d.reason = "singular tensor at t = 0";
        return d;
    }
    if (std::abs(d.phi0 - d.psi0) > 1e-8) {
        d.kind = DefinitenessKind::Inconsistent;
        d.reason = "phi(0) != psi(0): phi(0) = " + std::to_string(d.phi0) + ", psi(0) = " + std::to_string(d.psi0);
        return d;
    }
    const int s0 = detail::sign_of(d.phi0);
    const double dt = T.t_max / static_cast<double>(grid_size - 1);
    double prev = 0.0;
    for (std::size_t i = 1; i < grid_size; ++i) {
        const double t = (i + 1 == grid_size) ? T.t_max : dt * static_cast<double>(i);
        const bool phi_lost = detail::sign_of(T.phi.value(t)) != s0;
        const bool psi_lost = detail::sign_of(T.psi.value(t)) != s0;
        if (phi_lost || psi_lost) {
            double t_star = t;
            if (phi_lost)
                t_star = std::min(t_star, detail::bisect_sign_loss([&](double s) { return T.phi.value(s); }, prev, t, s0));
            if (psi_lost)
                t_star = std::min(t_star, detail::bisect_sign_loss([&](double s) { return T.psi.value(s); }, prev, t, s0));
            d.kind = DefinitenessKind::Singular;
            d.t_star = t_star;
            d.reason = "singular tensor at t = " + std::to_string(t_star);
            return d;
        }
        prev = t;
    }
    d.kind = s0 > 0 ? DefinitenessKind::PositiveDefinite : DefinitenessKind::NegativeDefinite;
    return d;
}

// ---------------------------------------------------------------------------
// Metric profiles

/// Sampled rotationally symmetric metric.  grid[0] = 0.
struct MetricProfile {
    std::size_t n = 3;
    std::vector<double> grid;
    std::vector<double> f;
    std::vector<double> r;
    std::vector<double> rp;
    std::vector<double> fp;

    std::size_t size() const { return grid.size(); }
};

/// Throws PreconditionError naming the first violated invariant:
/// r(0) = 0, r'(0) = 1, f(0) = 0, r' > 0, strictly increasing grid.
inline void validate(const MetricProfile& p, double tol = 1e-9) {
    const std::size_t m = p.grid.size();
    if (m < 5 || p.f.size() != m || p.r.size() != m || p.rp.size() != m || p.fp.size() != m)
        throw PreconditionError("metric profile: need at least 5 samples in every column");
    if (p.grid[0] != 0.0) throw PreconditionError("metric profile: grid must start at t = 0");
    if (std::abs(p.r[0]) > tol) throw PreconditionError("metric profile: r(0) = " + std::to_string(p.r[0]) + " != 0");
    if (std::abs(p.rp[0] - 1.0) > tol)
        throw PreconditionError("metric profile: r'(0) = " + std::to_string(p.rp[0]) + " != 1");
    if (std::abs(p.f[0]) > tol) throw PreconditionError("metric profile: f(0) = " + std::to_string(p.f[0]) + " != 0");
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && !(p.grid[i] > p.grid[i - 1]))
            throw PreconditionError("metric profile: grid not increasing at t = " + std::to_string(p.grid[i]));
        if (!(p.rp[i] > 0.0)) throw PreconditionError("metric profile: r' <= 0 at t = " + std::to_string(p.grid[i]));
        if (!std::isfinite(p.f[i]) || !std::isfinite(p.r[i]))
            throw PreconditionError("metric profile: non-finite sample at t = " + std::to_string(p.grid[i]));
    }
}

/// A metric profile given by closed-form f(t), r(t).  f must be even to
/// first order (f'(0) = 0) and r(0) = 0 for the origin to be regular.
struct ClosedFormProfile {
    std::size_t n = 3;
    expr::Expr f;
    expr::Expr r;
};

struct RicciPair {
    double alpha = 0.0;
    double beta = 0.0;
};

struct ForwardSamples {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> phi_hat;
    std::vector<double> psi_hat;
};

/// Forward Ricci map on every grid point of a sampled profile.  f_r' is
/// taken by 5-point differencing of f_r = f'/r'; at t = 0 the removable
/// ratio f_r / r is replaced by its limit f_rr and psi_hat(0) by beta(0).
inline ForwardSamples forward_samples(const MetricProfile& p) {
    const std::size_t m = p.size();
    if (m < 5) throw PreconditionError("forward_samples: need at least 5 samples");
    std::vector<double> fr(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(p.rp[i] > 0.0)) throw DomainError("forward_samples: r' <= 0 at t = " + std::to_string(p.grid[i]));
        fr[i] = p.fp[i] / p.rp[i];
    }
    const std::vector<double> dfr = grid::derivative(p.grid, fr);
    const double n = static_cast<double>(p.n);
    ForwardSamples out;
    out.alpha.resize(m);
    out.beta.resize(m);
    out.phi_hat.resize(m);
    out.psi_hat.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = p.grid[i];
        const double frr = dfr[i] / p.rp[i];
        double fr_over_r;
        if (t == 0.0) {
            fr_over_r = frr;
        } else {
            if (p.r[i] == 0.0) throw DomainError("forward_samples: r = 0 at t = " + std::to_string(t));
            fr_over_r = fr[i] / p.r[i];
        }
        out.alpha[i] = -(n - 1.0) * (frr + fr_over_r);
        out.beta[i] = -(frr + (2.0 * n - 3.0) * fr_over_r + (n - 2.0) * fr[i] * fr[i]);
        out.phi_hat[i] = out.alpha[i] * p.rp[i] * p.rp[i];
        out.psi_hat[i] = t == 0.0 ? out.beta[i] : p.r[i] * p.r[i] * out.beta[i] / (t * t);
    }
    return out;
}

/// (alpha, beta) at sample `index` of a sampled profile.
inline RicciPair ricci_forward(const MetricProfile& p, std::size_t index) {
    const ForwardSamples s = forward_samples(p);
    if (index >= s.alpha.size()) throw PreconditionError("ricci_forward: index out of range");
    return {s.alpha[index], s.beta[index]};
}

namespace detail {

/// a / b for jets with a(0) = b(0) = 0 (removable singularity), losing
/// one order.
template <std::size_t N>
Jet<N - 1> divide_vanishing(const Jet<N>& a, const Jet<N>& b, double scale) {
    if (std::abs(a.coeff(0)) > 1e-12 * scale || std::abs(b.coeff(0)) > 1e-12 * scale)
        throw DomainError("profile is not regular at the origin (0/0 limit does not exist)");
    Jet<N - 1> as, bs;
    for (std::size_t k = 0; k + 1 <= N; ++k) {
        as.coeff(k) = a.coeff(k + 1);
        bs.coeff(k) = b.coeff(k + 1);
    }
    return as / bs;
}

/// Jets of (alpha, beta, phi_hat, psi_hat) at t from jets of f and r of
/// order K; the results have order K - 2.
template <std::size_t K>
struct ForwardJets {
    Jet<K - 2> alpha, beta, phi_hat, psi_hat;
};

template <std::size_t K>
ForwardJets<K> forward_jets(const Jet<K>& f, const Jet<K>& r, double t, std::size_t dim) {
    constexpr std::size_t M = K - 2;
    const double n = static_cast<double>(dim);
    const Jet<K - 1> f1 = differentiate(f);
    const Jet<K - 1> r1 = differentiate(r);
    if (!(r1.value() > 0.0)) throw DomainError("forward map: r' <= 0 at t = " + std::to_string(t));
    const Jet<K - 1> fr = f1 / r1;
    const Jet<M> frr = differentiate(fr) / truncate<M>(r1);
    Jet<M> fr_over_r;
    Jet<M> r_over_t;
    if (t == 0.0) {
        fr_over_r = truncate<M>(divide_vanishing(fr, truncate<K - 1>(r), 1.0));
        r_over_t = truncate<M>(divide_vanishing(r, Jet<K>::variable(0.0), 1.0));
    } else {
        if (r.value() == 0.0) throw DomainError("forward map: r = 0 at t = " + std::to_string(t));
        fr_over_r = truncate<M>(fr) / truncate<M>(r);
        r_over_t = truncate<M>(r) / Jet<M>::variable(t);
    }
    const Jet<M> frM = truncate<M>(fr);
    const Jet<M> r1M = truncate<M>(r1);
    ForwardJets<K> out;
    out.alpha = Jet<M>(-(n - 1.0)) * (frr + fr_over_r);
    out.beta = -(frr + Jet<M>(2.0 * n - 3.0) * fr_over_r + Jet<M>(n - 2.0) * frM * frM);
    out.phi_hat = out.alpha * r1M * r1M;
    out.psi_hat = r_over_t * r_over_t * out.beta;
    return out;
}

} // namespace detail

/// (alpha, beta) of a closed-form profile at t > 0, by jets (no differencing).
inline RicciPair ricci_forward(const ClosedFormProfile& p, double t) {
    if (!(t > 0.0)) throw PreconditionError("ricci_forward: t must be positive");
    const auto j = detail::forward_jets<2>(expr::eval<2>(p.f, t), expr::eval<2>(p.r, t), t, p.n);
    return {j.alpha.value(), j.beta.value()};
}

/// The tensor a closed-form profile's metric has as its Ricci tensor:
/// phi_hat = alpha r'^2, psi_hat = r^2 beta / t^2, extended continuously to
/// t = 0.  Both are returned as second-order jets, so the result feeds
/// straight back into the solver.
inline RotSymTensor forward_tensor(const ClosedFormProfile& p, double t_max) {
    auto make = [p](bool phi) {
        return [p, phi](double t) {
            const auto j = detail::forward_jets<4>(expr::eval<4>(p.f, t), expr::eval<4>(p.r, t), t, p.n);
            return phi ? j.phi_hat : j.psi_hat;
        };
    };
    const std::string tag = "[f = " + p.f.to_string() + ", r = " + p.r.to_string() + "]";
    return RotSymTensor{p.n, ScalarFn(make(true), "phi_hat" + tag), ScalarFn(make(false), "psi_hat" + tag), t_max};
}

/// Samples of closed-form f, r (and derivatives) on a grid, as a profile.
inline MetricProfile sample(const ClosedFormProfile& p, const std::vector<double>& grid) {
    MetricProfile out;
    out.n = p.n;
    out.grid = grid;
    for (double t : grid) {
        const Jet2 f = expr::eval_jet2(p.f, t);
        const Jet2 r = expr::eval_jet2(p.r, t);
        out.f.push_back(f.v());
        out.fp.push_back(f.d1());
        out.r.push_back(r.v());
        out.rp.push_back(r.d1());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cartesian realizations of a closed-form profile's metric

enum class MetricConvention {
    LinearWarp,       ///< 2 e^f [r' dt^2 + r^2 dTheta^2]
    ConformalSquared, ///< e^{2f} [r'^2 dt^2 + r^2 dTheta^2] = e^{2f} [dr^2 + r^2 dTheta^2]
};

inline tensorlab::MetricField cartesian_metric(const ClosedFormProfile& p, MetricConvention convention) {
    const expr::Expr f = p.f;
    const expr::Expr r = p.r;
    ScalarFn a, b;
    if (convention == MetricConvention::LinearWarp) {
        a = ScalarFn([f, r](double t) { return Jet2(2.0) * exp(expr::eval_jet2(f, t)) * differentiate(expr::eval<3>(r, t)); },
                     "2e^f r'");
        b = ScalarFn([f, r](double t) {
                         const Jet2 rv = expr::eval_jet2(r, t);
                         return Jet2(2.0) * exp(expr::eval_jet2(f, t)) * rv * rv;
                     },
                     "2e^f r^2");
    } else {
        a = ScalarFn([f, r](double t) {
                         const Jet2 r1 = differentiate(expr::eval<3>(r, t));
                         return exp(Jet2(2.0) * expr::eval_jet2(f, t)) * r1 * r1;
                     },
                     "e^2f r'^2");
        b = ScalarFn([f, r](double t) {
                         const Jet2 rv = expr::eval_jet2(r, t);
                         return exp(Jet2(2.0) * expr::eval_jet2(f, t)) * rv * rv;
                     },
                     "e^2f r^2");
    }
    return tensorlab::rotsym_to_cartesian(std::move(a), std::move(b), p.n);
}

} // namespace ricci::rotsym
