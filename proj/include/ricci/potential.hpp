#pragma once

// The Ricci potential w(t) as a folded separatrix.
//
// With p = dw/dt the potential satisfies the implicit equation F = 0, where
//
//   F(t, w, p) = 1/(n-1) [(n-2) phi(t) (w^2 - 2w) + t^2 phi(t) psi(t)] - p^2.
//
// The Lie-Cartan field X = (F_p, p F_p, -(F_t + p F_w)) is tangent to
// F^{-1}(0), vanishes at the origin, and the origin is a hyperbolic saddle
// of X restricted to the surface whenever phi(0) psi(0) > 0.  The smooth
// solution with w(0) = w'(0) = 0 and w' phi(0) > 0 is the projection of
// one of its separatrices.  It is seeded by a Taylor series at the origin
// and continued with RK4 in t, projecting p back onto F = 0 after every
// step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/jet.hpp"
#include "ricci/rotsym.hpp"
#include "ricci/scalar_fn.hpp"

namespace ricci::potential {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct SurfaceF {
    std::size_t n = 3;
    ScalarFn phi;
    ScalarFn psi;
    double t_max = 1.0;

    static SurfaceF from(const rotsym::RotSymTensor& T) { return SurfaceF{T.n, T.phi, T.psi, T.t_max}; }
};

struct SurfaceEval {
    double F = 0.0;
    double F_t = 0.0;
    double F_w = 0.0;
    double F_p = 0.0;
};

/// F and its first partials.  phi, psi are evaluated by their closed forms,
/// which also supplies their extension to t < 0.
inline SurfaceEval surface_eval(const SurfaceF& S, double t, double w, double p) {
    if (S.n < 2) throw PreconditionError("surface_eval: n must be at least 2");
    const Jet2 phi = S.phi(t);
    const Jet2 psi = S.psi(t);
    const Jet2 tt = Jet2::variable(t);
    const Jet2 q = tt * tt * phi * psi; // t^2 phi psi
    const double c = 1.0 / static_cast<double>(S.n - 1);
    const double m = static_cast<double>(S.n - 2);
    const double quad = w * w - 2.0 * w;
    SurfaceEval e;
    e.F = c * (m * phi.v() * quad + q.v()) - p * p;
    e.F_t = c * (m * phi.d1() * quad + q.d1());
    e.F_w = c * m * phi.v() * (2.0 * w - 2.0);
    e.F_p = -2.0 * p;
    return e;
}

/// G(t, w) = F(t, w, 0): the value p^2 must take on the surface.
inline double surface_rhs(const SurfaceF& S, double t, double w) { return surface_eval(S, t, w, 0.0).F; }

/// X = F_p d/dt + p F_p d/dw - (F_t + p F_w) d/dp.
inline Vec3 lie_cartan_field(const SurfaceF& S, const Vec3& state) {
    const auto [t, w, p] = state;
    const SurfaceEval e = surface_eval(S, t, w, p);
    return {e.F_p, p * e.F_p, -(e.F_t + p * e.F_w)};
}

// ---------------------------------------------------------------------------
// Saddle at the origin

enum class SaddleKind { FoldedSaddle, Degenerate };

struct SaddleReport {
    Mat3 DX0{};
    double lambda1 = 0.0; ///< positive eigenvalue
    double lambda2 = 0.0; ///< negative eigenvalue
    Vec3 unstable_dir{};  ///< eigenvector of lambda1, oriented toward t > 0
    Vec3 stable_dir{};    ///< eigenvector of lambda2, oriented toward t > 0
    SaddleKind classification = SaddleKind::Degenerate;
    std::string reason;
    double w2 = 0.0;       ///< w''(0) of the solution separatrix, sign(w2) = sign(phi(0))
    double w2_other = 0.0; ///< the other root: the second folded separatrix
    double w3 = 0.0;       ///< w'''(0) of the solution separatrix
    double phi0 = 0.0;
    double psi0 = 0.0;
    double dphi0 = 0.0;

    bool folded_saddle() const { return classification == SaddleKind::FoldedSaddle; }
};

/// w'''(0) = b of the separatrix with w''(0) = a.  Matching the s^3 terms
/// of p^2 = G(s, w(s)) gives
///   b [(n-1) a + (n-2) phi0 / 3] = phi0 psi1 + phi1 psi0 - (n-2) phi1 a.
inline double series_cubic(std::size_t n, double a, const Jet2& phi, const Jet2& psi) {
    const double m = static_cast<double>(n - 2);
    const double denom = static_cast<double>(n - 1) * a + m * phi.v() / 3.0;
    if (denom == 0.0) throw NumericalError("series_cubic: degenerate series at the origin");
    return (phi.v() * psi.d1() + phi.d1() * psi.v() - m * phi.d1() * a) / denom;
}

/// Linearization of X at the origin and the separatrix series data.
///
/// DX(0) rows: (0, 0, -2), (0, 0, 0),
///   (-2 phi0 psi0/(n-1), 2(n-2) phi'(0)/(n-1), 2(n-2) phi0/(n-1)).
/// Its nonzero eigenvalues solve -l^2 + 2(n-2)phi0/(n-1) l + 4 phi0 psi0/(n-1) = 0.
inline SaddleReport saddle_report(const SurfaceF& S) {
    SaddleReport rep;
    const Jet2 phi = S.phi(0.0);
    const Jet2 psi = S.psi(0.0);
    rep.phi0 = phi.v();
    rep.psi0 = psi.v();
    rep.dphi0 = phi.d1();
    if (S.n == 2) {
        rep.reason = "n = 2: the equation is explicit, use solve_n2";
        return rep;
    }
    if (S.n < 2) {
        rep.reason = "dimension below 2";
        return rep;
    }
    if (!(rep.phi0 * rep.psi0 > 0.0)) {
        rep.reason = "phi(0) psi(0) <= 0";
        return rep;
    }
    const double n = static_cast<double>(S.n);
    const double trace = 2.0 * (n - 2.0) * rep.phi0 / (n - 1.0);
    const double c = 4.0 * rep.phi0 * rep.psi0 / (n - 1.0);
    rep.DX0 = {Vec3{0.0, 0.0, -2.0}, Vec3{0.0, 0.0, 0.0},
               Vec3{-2.0 * rep.phi0 * rep.psi0 / (n - 1.0), 2.0 * (n - 2.0) * rep.dphi0 / (n - 1.0), trace}};

    // roots of l^2 - trace l - c = 0, the larger-magnitude one first
    const double disc = std::sqrt(trace * trace + 4.0 * c);
    const double big = trace >= 0.0 ? 0.5 * (trace + disc) : 0.5 * (trace - disc);
    const double small = -c / big;
    rep.lambda1 = std::max(big, small);
    rep.lambda2 = std::min(big, small);
    auto eigvec = [](double lambda) {
        const double norm = std::sqrt(1.0 + 0.25 * lambda * lambda);
        return Vec3{1.0 / norm, 0.0, -0.5 * lambda / norm};
    };
    rep.unstable_dir = eigvec(rep.lambda1);
    rep.stable_dir = eigvec(rep.lambda2);
    rep.classification = rep.lambda1 * rep.lambda2 < 0.0 ? SaddleKind::FoldedSaddle : SaddleKind::Degenerate;
    if (!rep.folded_saddle()) rep.reason = "eigenvalues do not straddle zero";

    // (n-1) w2^2 + (n-2) phi0 w2 - phi0 psi0 = 0
    const double qa = n - 1.0;
    const double qb = (n - 2.0) * rep.phi0;
    const double qc = -rep.phi0 * rep.psi0;
    const double qd = std::sqrt(qb * qb - 4.0 * qa * qc);
    const double r1 = qb >= 0.0 ? (-qb - qd) / (2.0 * qa) : (-qb + qd) / (2.0 * qa);
    const double r2 = qc / (qa * r1);
    const bool r1_matches = (r1 > 0.0) == (rep.phi0 > 0.0);
    rep.w2 = r1_matches ? r1 : r2;
    rep.w2_other = r1_matches ? r2 : r1;
    rep.w3 = series_cubic(S.n, rep.w2, phi, psi);
    return rep;
}

// ---------------------------------------------------------------------------
// Fold curve

/// The p = 0 branch of F = F_p = 0 at t: real roots of
/// (n-2)(w^2 - 2w) + t^2 psi(t) = 0, ascending.  Empty when there are none
/// (and always for n = 2 away from t = 0).
inline std::vector<double> fold_curve(const SurfaceF& S, double t) {
    if (S.n == 2) return t == 0.0 ? std::vector<double>{0.0} : std::vector<double>{};
    const double x = t * t * S.psi.value(t) / static_cast<double>(S.n - 2);
    const double disc = 1.0 - x;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {1.0};
    const double s = std::sqrt(disc);
    // 1 - sqrt(1 - x) written without cancellation
    return {x / (1.0 + s), 1.0 + s};
}

// ---------------------------------------------------------------------------
// Separatrix integration

struct SeriesSeed {
    double w2 = 0.0;
    double w3 = 0.0;
};

struct PotentialCurve {
    std::size_t n = 3;
    std::vector<double> t;
    std::vector<double> w;
    std::vector<double> p;
    double delta = 0.0;      ///< seed offset
    int series_order = 3;    ///< order of the Taylor seed
    SeriesSeed series;       ///< Taylor data at the origin
    enum class Halt { ReachedEnd, FoldContact, SurfaceExit } halt = Halt::ReachedEnd;
    double halt_t = 0.0;

    std::size_t size() const { return t.size(); }
};

inline const char* to_string(PotentialCurve::Halt h) {
    switch (h) {
    case PotentialCurve::Halt::ReachedEnd: return "reached t_end";
    case PotentialCurve::Halt::FoldContact: return "fold contact";
    case PotentialCurve::Halt::SurfaceExit: return "surface exit";
    }
    return "?";
}

struct JetState {
    double t = 0.0;
    double w = 0.0;
    double p = 0.0;
};

namespace detail {

/// Newton on p for F(t, w, p) = 0 with (t, w) held.  Converges to
/// sign(p0) sqrt(G(t, w)).  Returns nullopt if G < 0 or no convergence.
inline std::optional<double> project_p(const SurfaceF& S, double t, double w, double p0, int max_iter = 20) {
    const double G = surface_rhs(S, t, w);
    if (G < 0.0 || p0 == 0.0) return std::nullopt;
    double p = p0;
    for (int it = 0; it < max_iter; ++it) {
        const double F = G - p * p;
        const double step = F / (2.0 * p);
        p += step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(p)) return p;
    }
    return std::nullopt;
}

} // namespace detail

/// Taylor seed of a folded separatrix at t = direction * delta:
///   w = w2 t^2/2 + w3 t^3/6,  p = w2 t + w3 t^2/2,
/// then p is Newton-projected onto F = 0 with (t, w) fixed.  By default the
/// solution separatrix (w2 from the report) is seeded.
inline JetState seed_separatrix(const SurfaceF& S, const SaddleReport& rep, double delta, int direction = +1,
                                std::optional<SeriesSeed> series = std::nullopt) {
    if (!(delta > 0.0) || delta > 1e-2 * S.t_max)
        throw PreconditionError("seed_separatrix: require 0 < delta <= 1e-2 t_max");
    const SeriesSeed sd = series.value_or(SeriesSeed{rep.w2, rep.w3});
    const double t = direction >= 0 ? delta : -delta;
    JetState s;
    s.t = t;
    s.w = sd.w2 * t * t / 2.0 + sd.w3 * t * t * t / 6.0;
    const double p0 = sd.w2 * t + sd.w3 * t * t / 2.0;
    const auto p = detail::project_p(S, t, s.w, p0);
    if (!p) throw NumericalError("seed_separatrix: projection onto F = 0 failed to converge in 20 iterations");
    s.p = *p;
    return s;
}

struct IntegrationOptions {
    double fold_tol = 1e-8;   ///< |F_p| below this is fold contact
    double exit_tol = 1e-12;  ///< F below -exit_tol after a step is a surface exit
    double ramp = 0.1;        ///< steps are capped at ramp * |t| near the origin
};

/// RK4 in t for dw/dt = p, dp/dt = -(F_t + p F_w)/F_p (the Lie-Cartan field
/// rescaled to unit speed in t), with p projected onto F = 0 after each
/// step.  Integrates from the seed toward t_end (either direction).  Fold
/// contact and surface exit end the curve and are recorded in `halt`.
inline PotentialCurve integrate_separatrix(const SurfaceF& S, const JetState& seed, double step, double t_end,
                                           const IntegrationOptions& opt = {}) {
    if (!(step > 0.0)) throw PreconditionError("integrate_separatrix: step must be positive");
    {
        const double F = surface_eval(S, seed.t, seed.w, seed.p).F;
        if (std::abs(F) > 1e-10 * std::max(1.0, seed.p * seed.p))
            throw PreconditionError("integrate_separatrix: seed is not on the surface");
    }
    PotentialCurve c;
    c.n = S.n;
    c.delta = std::abs(seed.t);
    c.t.push_back(seed.t);
    c.w.push_back(seed.w);
    c.p.push_back(seed.p);

    const double dir = t_end >= seed.t ? 1.0 : -1.0;
    struct Deriv {
        double dw, dp;
        bool fold;
    };
    auto rhs = [&](double t, double w, double p) -> Deriv {
        const SurfaceEval e = surface_eval(S, t, w, p);
        if (std::abs(e.F_p) < opt.fold_tol) return {0.0, 0.0, true};
        return {p, -(e.F_t + p * e.F_w) / e.F_p, false};
    };

    double t = seed.t, w = seed.w, p = seed.p;
    const double scale = std::max(1.0, std::abs(t_end));
    // Rejected steps (leaving the surface, p changing sign) are retried at
    // half size down to h_min.  Only the fold can make (t, w) leave the
    // projection of the surface, so a rejection that survives refinement
    // with F_p already small is fold contact.
    const double h_min = 1e-12 * scale;
    double h_cap = step;
    auto halt = [&](PotentialCurve::Halt why) {
        c.halt = why;
        c.halt_t = t;
        return c;
    };
    while (dir * (t_end - t) > 1e-14 * scale) {
        double h = std::min({h_cap, opt.ramp * std::abs(t), std::abs(t_end - t)});
        if (!(h > 1e-15 * scale) && std::abs(t_end - t) > 1e-15 * scale)
            throw NumericalError("integrate_separatrix: step-size underflow at t = " + std::to_string(t));
        h *= dir;
        const Deriv k1 = rhs(t, w, p);
        if (k1.fold) return halt(PotentialCurve::Halt::FoldContact);
        const Deriv k2 = rhs(t + 0.5 * h, w + 0.5 * h * k1.dw, p + 0.5 * h * k1.dp);
        const Deriv k3 = rhs(t + 0.5 * h, w + 0.5 * h * k2.dw, p + 0.5 * h * k2.dp);
        const Deriv k4 = rhs(t + h, w + h * k3.dw, p + h * k3.dp);
        const double tn = (std::abs(t_end - (t + h)) <= 1e-14 * scale) ? t_end : t + h;
        const double wn = w + h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
        const double pn = p + h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        const double G = surface_rhs(S, tn, wn);
        const bool rejected = k2.fold || k3.fold || k4.fold || G < -opt.exit_tol || (pn > 0.0) != (p > 0.0);
        if (rejected) {
            if (std::abs(h) > h_min) {
                h_cap = 0.5 * std::abs(h);
                continue;
            }
            const bool near_fold = 2.0 * std::abs(p) < std::sqrt(opt.fold_tol);
            return halt(near_fold ? PotentialCurve::Halt::FoldContact : PotentialCurve::Halt::SurfaceExit);
        }
        if (2.0 * std::sqrt(std::max(G, 0.0)) < opt.fold_tol) return halt(PotentialCurve::Halt::FoldContact);
        const auto projected = detail::project_p(S, tn, wn, pn);
        if (!projected)
            throw NumericalError("integrate_separatrix: projection failed at t = " + std::to_string(tn));
        t = tn;
        w = wn;
        p = *projected;
        c.t.push_back(t);
        c.w.push_back(w);
        c.p.push_back(p);
        h_cap = std::min(step, 2.0 * h_cap);
    }
    c.halt = PotentialCurve::Halt::ReachedEnd;
    c.halt_t = t;
    return c;
}

/// Seeds and integrates the solution separatrix on [delta, t_end].
inline PotentialCurve solve_separatrix(const SurfaceF& S, double step, double t_end, double delta = 0.0,
                                       const IntegrationOptions& opt = {}) {
    const SaddleReport rep = saddle_report(S);
    if (!rep.folded_saddle()) throw PreconditionError("solve_separatrix: origin is not a folded saddle: " + rep.reason);
    if (delta == 0.0) delta = 1e-4 * S.t_max;
    PotentialCurve c = integrate_separatrix(S, seed_separatrix(S, rep, delta), step, t_end, opt);
    c.series = {rep.w2, rep.w3};
    return c;
}

/// n = 2: F = 0 reduces to dw/dt = +-t sqrt(phi psi), integrated by
/// composite Simpson.  Samples start at t = 0.
inline PotentialCurve solve_n2(const ScalarFn& phi, const ScalarFn& psi, int sign, double t_end, double step) {
    if (!(step > 0.0) || !(t_end > 0.0)) throw PreconditionError("solve_n2: step and t_end must be positive");
    const double sg = sign >= 0 ? 1.0 : -1.0;
    auto integrand = [&](double s) {
        const double prod = phi.value(s) * psi.value(s);
        if (prod < 0.0) throw DomainError("solve_n2: phi psi < 0 at t = " + std::to_string(s));
        return s * std::sqrt(prod);
    };
    PotentialCurve c;
    c.n = 2;
    c.delta = 0.0;
    c.series_order = 3;
    {
        const Jet2 ph = phi(0.0);
        const Jet2 ps = psi(0.0);
        const double prod0 = ph.v() * ps.v();
        if (prod0 < 0.0) throw DomainError("solve_n2: phi psi < 0 at t = 0");
        c.series.w2 = sg * std::sqrt(prod0);
        c.series.w3 = c.series.w2 != 0.0 ? series_cubic(2, c.series.w2, ph, ps) : 0.0;
    }
    const auto intervals = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
    double w = 0.0;
    c.t.push_back(0.0);
    c.w.push_back(0.0);
    c.p.push_back(0.0);
    double f_prev = integrand(0.0);
    for (std::size_t i = 1; i <= intervals; ++i) {
        const double a = c.t.back();
        const double b = i == intervals ? t_end : step * static_cast<double>(i);
        const double fm = integrand(0.5 * (a + b));
        const double fb = integrand(b);
        w += (b - a) / 6.0 * (f_prev + 4.0 * fm + fb);
        f_prev = fb;
        c.t.push_back(b);
        c.w.push_back(sg * w);
        c.p.push_back(sg * fb);
    }
    c.halt = PotentialCurve::Halt::ReachedEnd;
    c.halt_t = t_end;
    return c;
}

// ---------------------------------------------------------------------------
// Global continuation margins

enum class GlobalVerdict { GlobalContinuationExpected, HypothesisFailure };

struct GlobalReport {
    double regularity_margin = 0.0;      ///< (a) min |grad F| on sampled F^{-1}(0)
    double fold_regularity_margin = 0.0; ///< (b) min |d/dt(t^2 psi) phi| on (0, t_max]
    std::optional<double> fold_regularity_failure_t; ///< first zero of (b), if any
    double fold_distance = std::numeric_limits<double>::infinity(); ///< (c) curve to fold branches
    GlobalVerdict verdict = GlobalVerdict::HypothesisFailure;
    std::string reason;
};

/// Scans the hypotheses of the global existence argument: regularity of
/// F^{-1}(0), regularity of the fold (d/dt(t^2 psi) phi != 0), and how
/// close the curve comes to the fold.
inline GlobalReport check_global(const SurfaceF& S, const PotentialCurve& curve, std::size_t scan = 1000) {
    GlobalReport rep;
    const double t_max = S.t_max;

    // (b) fold regularity
    auto margin_b = [&](double t) {
        const Jet2 psi = S.psi(t);
        const double dq = 2.0 * t * psi.v() + t * t * psi.d1();
        return dq * S.phi.value(t);
    };
    rep.fold_regularity_margin = std::numeric_limits<double>::infinity();
    const double dt = t_max / static_cast<double>(scan);
    double prev_t = dt;
    double prev_v = margin_b(dt);
    for (std::size_t i = 1; i <= scan; ++i) {
        const double t = i == scan ? t_max : dt * static_cast<double>(i);
        const double v = margin_b(t);
        rep.fold_regularity_margin = std::min(rep.fold_regularity_margin, std::abs(v));
        if (!rep.fold_regularity_failure_t) {
            if (v == 0.0) {
                rep.fold_regularity_failure_t = t;
            } else if ((v > 0.0) != (prev_v > 0.0) && prev_v != 0.0) {
                double lo = prev_t, hi = t;
                const bool lo_pos = prev_v > 0.0;
                while (hi - lo > 1e-12 * std::max(1.0, t)) {
                    const double mid = 0.5 * (lo + hi);
                    const double mv = margin_b(mid);
                    if (mv == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    ((mv > 0.0) == lo_pos ? lo : hi) = mid;
                }
                rep.fold_regularity_failure_t = 0.5 * (lo + hi);
                rep.fold_regularity_margin = 0.0;
            }
        }
        prev_t = t;
        prev_v = v;
    }
    if (rep.fold_regularity_failure_t) rep.fold_regularity_margin = 0.0;

    // (a) surface regularity on a (t, w) scan
    double w_lo = -1.0, w_hi = 3.0;
    for (double w : curve.w) {
        w_lo = std::min(w_lo, w - 1.0);
        w_hi = std::max(w_hi, w + 1.0);
    }
    const std::size_t nt = 200, nw = 200;
    rep.regularity_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= nt; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(nt);
        for (std::size_t j = 0; j <= nw; ++j) {
            const double w = w_lo + (w_hi - w_lo) * static_cast<double>(j) / static_cast<double>(nw);
            const double G = surface_rhs(S, t, w);
            if (G < 0.0) continue;
            const SurfaceEval e = surface_eval(S, t, w, std::sqrt(G));
            rep.regularity_margin = std::min(rep.regularity_margin, std::hypot(e.F_t, e.F_w, e.F_p));
        }
    }

    // (c) distance from the curve to the fold branches, away from the origin
    const double t_lo = 0.05 * t_max;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (std::abs(curve.t[i]) < t_lo) continue;
        for (double wf : fold_curve(S, curve.t[i]))
            rep.fold_distance = std::min(rep.fold_distance, std::abs(curve.w[i] - wf));
    }

    const bool reached = curve.size() > 0 && curve.halt == PotentialCurve::Halt::ReachedEnd;
    if (!(rep.regularity_margin > 1e-12)) {
        rep.reason = "F^{-1}(0) is not regular on the scanned range";
    } else if (rep.fold_regularity_failure_t) {
        rep.reason = "d/dt(t^2 psi) phi vanishes at t = " + std::to_string(*rep.fold_regularity_failure_t);
    } else if (!reached) {
        rep.reason = curve.size() == 0 ? "no curve supplied" : std::string("curve halted: ") + to_string(curve.halt);
    } else {
        rep.verdict = GlobalVerdict::GlobalContinuationExpected;
        rep.reason = "hypotheses hold on (0, t_max]";
    }
    return rep;
}

} // namespace ricci::potential
