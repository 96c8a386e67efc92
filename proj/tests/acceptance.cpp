// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ricci/grid.hpp"
#include "ricci/hypersurface.hpp"
#include "ricci/pipeline.hpp"
#include "ricci/potential.hpp"
#include "ricci/reconstruct.hpp"
#include "ricci/rotsym.hpp"
#include "ricci/tensorlab.hpp"

using namespace ricci;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

rotsym::RotSymTensor tensor(const std::string& phi, const std::string& psi, std::size_t n, double t_max) {
    return {n, ScalarFn::parse(phi), ScalarFn::parse(psi), t_max};
}

rotsym::RotSymTensor gold(std::size_t n, double t_max) {
    const double a = 4.0 * (static_cast<double>(n) - 1.0);
    const double b = 4.0 * (static_cast<double>(n) - 2.0);
    return tensor(std::to_string(a), std::to_string(a) + " - " + std::to_string(b) + "*t^2", n, t_max);
}

hypersurface::GraphEmbedding graph(const char* h, double r_max) {
    return {3, ScalarFn(expr::parse(h, "u")), r_max};
}

tensorlab::Point on_axis(double r) { return {r, 0.0, 0.0}; }

double max_diff(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix d = a;
    d -= b;
    return d.max_abs();
}

double drift(const potential::SurfaceF& S, const potential::PotentialCurve& c) { return max_constraint(S, c); }

Outcome ac1() {
    Outcome o;
    for (std::size_t n : {3u, 4u, 5u}) {
        const auto T = gold(n, 0.5);
        SolveOptions opt;
        opt.t_lo = 0.05;
        const auto sol = ricci::solve(T, opt);
        const auto& P = sol.reconstruction.profile;
        const double ew = std::abs(sol.reconstruction.w.back() - 0.5);
        const double er = std::abs(P.r.back() - 0.5);
        const double ef = std::abs(P.f.back() + 0.25);
        const double res = std::max(sol.reconstruction.ricci.res_rr, sol.reconstruction.ricci.res_thth);
        o.require(P.grid.back() == 0.5 && std::max({ew, er, ef}) <= 1e-6 && res <= 1e-6,
                  "n=" + std::to_string(n) + " err " + num(std::max({ew, er, ef})) + " res " + num(res));
    }
    return o;
}

Outcome ac2() {
    Outcome o;
    double worst_root = 0.0, worst_prod = 0.0;
    for (std::size_t n : {3u, 4u, 5u, 8u})
        for (double a : {1.0, 8.0, -1.0, -8.0}) {
            const auto S = potential::SurfaceF::from(tensor(num(a), num(a), n, 1.0));
            const auto rep = potential::saddle_report(S);
            const double nn = static_cast<double>(n);
            // roots of the quadratic, computed independently
            const double qa = -1.0, qb = 2 * (nn - 2) * a / (nn - 1), qc = 4 * a * a / (nn - 1);
            const double d = std::sqrt(qb * qb - 4 * qa * qc);
            const double x1 = (-qb - d) / (2 * qa), x2 = (-qb + d) / (2 * qa);
            worst_root = std::max({worst_root, std::abs(rep.lambda1 - std::max(x1, x2)),
                                   std::abs(rep.lambda2 - std::min(x1, x2))});
            worst_prod = std::max(worst_prod, std::abs(rep.lambda1 * rep.lambda2 + qc));
        }
    o.require(worst_root <= 1e-10, "roots " + num(worst_root));
    o.require(worst_prod <= 1e-10, "product " + num(worst_prod));
    const auto s8 = potential::saddle_report(potential::SurfaceF::from(tensor("8", "8", 3, 1.0)));
    const auto s1 = potential::saddle_report(potential::SurfaceF::from(tensor("1", "1", 3, 1.0)));
    o.require(std::abs(s8.lambda1 - 16) <= 1e-10 && std::abs(s8.lambda2 + 8) <= 1e-10, "{16,-8}");
    o.require(std::abs(s1.lambda1 - 2) <= 1e-10 && std::abs(s1.lambda2 + 1) <= 1e-10, "{2,-1}");
    return o;
}

// Least-squares fit of w = a t^2/2 + b t^3/6 on the first samples.
double fitted_second_derivative(const potential::PotentialCurve& c, double t_fit) {
    double s11 = 0, s12 = 0, s22 = 0, y1 = 0, y2 = 0;
    for (std::size_t i = 0; i < c.size() && c.t[i] <= t_fit; ++i) {
        const double u = c.t[i] * c.t[i] / 2, v = c.t[i] * c.t[i] * c.t[i] / 6;
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        y1 += u * c.w[i];
        y2 += v * c.w[i];
    }
    return (y1 * s22 - y2 * s12) / (s11 * s22 - s12 * s12);
}

Outcome ac3() {
    Outcome o;
    for (std::size_t n : {3u, 4u, 5u}) {
        const auto S = potential::SurfaceF::from(tensor("1", "1", n, 1.0));
        const auto c = potential::solve_separatrix(S, 1e-4, 0.05, 1e-5);
        const double a = fitted_second_derivative(c, 0.05);
        const double expect = 1.0 / (static_cast<double>(n) - 1.0);
        o.require(std::abs(a - expect) <= 1e-3, "n=" + std::to_string(n) + " w''(0)=" + num(a));
    }
    return o;
}

Outcome ac4() {
    Outcome o;
    for (const char* f : {"-t^2/2", "-t^2"})
        for (std::size_t n : {3u, 4u}) {
            const rotsym::ClosedFormProfile prof{n, expr::parse(f), expr::parse("t")};
            const auto sol = ricci::solve(rotsym::forward_tensor(prof, 0.4));
            const auto& P = sol.reconstruction.profile;
            double err = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i) {
                err = std::max(err, std::abs(P.r[i] - P.grid[i]));
                err = std::max(err, std::abs(P.f[i] - expr::eval_value(prof.f, P.grid[i])));
            }
            o.require(err <= 1e-4 && P.grid.back() == 0.4, std::string(f) + " n=" + std::to_string(n) + " " + num(err));
        }
    return o;
}

Outcome ac5() {
    Outcome o;
    const auto sphere = graph("sqrt(1 - u)", 0.9);
    const auto mf = hypersurface::cartesian_metric(sphere);
    double analytic = 0.0, oracle = 0.0, scalar = 0.0;
    for (double r : {0.3, 0.5, 0.7}) {
        const auto ric = hypersurface::ricci_graph(sphere, r);
        const auto g = hypersurface::induced_metric(sphere, r);
        analytic = std::max({analytic, std::abs(ric.ric_rr - 2 * g.g_rr), std::abs(ric.ric_thth_unit - 2 * g.g_thth)});
        const SymMatrix num_ric = tensorlab::ricci_numeric(mf, on_axis(r));
        oracle = std::max({oracle, std::abs(num_ric(0, 0) - ric.ric_rr),
                           std::abs(num_ric(1, 1) - ric.ric_thth_unit / (r * r)),
                           std::abs(num_ric(2, 2) - ric.ric_thth_unit / (r * r))});
        scalar = std::max({scalar, std::abs(tensorlab::scalar_curvature(mf, on_axis(r)) - 6),
                           std::abs(hypersurface::gauss_curvatures(hypersurface::principal_curvatures(sphere, r)).scalar - 6)});
    }
    o.require(analytic <= 1e-8, "sphere 2g " + num(analytic));
    o.require(oracle <= 1e-4, "sphere oracle " + num(oracle));
    o.require(scalar <= 1e-3, "sphere scalar " + num(scalar));

    const auto par = graph("u", 2.0);
    const auto ric = hypersurface::ricci_graph(par, 1.0);
    const auto g = hypersurface::induced_metric(par, 1.0);
    const double prop_rr = ric.ric_rr / g.g_rr, prop_tt = ric.ric_thth_unit / g.g_thth;
    const auto gauss = hypersurface::gauss_curvatures(hypersurface::principal_curvatures(par, 1.0));
    double frame = std::max(std::abs(prop_rr - 0.32), std::abs(prop_tt - 0.96));
    frame = std::max({frame, std::abs(gauss.ricci_frame(0, 0) - 0.32), std::abs(gauss.ricci_frame(1, 1) - 0.96),
                      std::abs(gauss.ricci_frame(2, 2) - 0.96)});
    const double par_scalar = std::max(std::abs(gauss.scalar - 2.24), std::abs(prop_rr + 2 * prop_tt - 2.24));
    o.require(frame <= 1e-6, "paraboloid frame " + num(frame));
    o.require(par_scalar <= 1e-5, "paraboloid scalar " + num(par_scalar));
    return o;
}

Outcome ac6() {
    Outcome o;
    double numeric = tensorlab::ricci_numeric(tensorlab::euclidean(3), {0.3, -0.2, 0.5}).max_abs();
    double analytic = 0.0, gauss = 0.0, variant = 0.0;
    for (const char* h : {"0", "2"})
        for (double r : {0.0, 0.5, 1.0}) {
            const auto E = graph(h, 1.0);
            const auto ric = hypersurface::ricci_graph(E, r);
            analytic = std::max({analytic, std::abs(ric.ric_rr), std::abs(ric.ric_thth_unit)});
            const auto gc = hypersurface::gauss_curvatures(hypersurface::principal_curvatures(E, r));
            gauss = std::max({gauss, gc.riemann.max_abs(), gc.ricci_frame.max_abs(), std::abs(gc.scalar)});
            variant = std::max(variant,
                               std::abs(hypersurface::ricci_graph(E, r, hypersurface::TangentialFormula::PlusTwo).ric_thth_unit));
        }
    numeric = std::max(numeric, tensorlab::ricci_numeric(hypersurface::cartesian_metric(graph("0", 1.0)), {0.1, 0.2, 0.3}).max_abs());
    o.require(numeric <= 1e-8, "ricci_numeric " + num(numeric));
    o.require(analytic <= 1e-8, "ricci_graph " + num(analytic));
    o.require(gauss <= 1e-8, "gauss " + num(gauss));
    o.require(variant > 1e-8, "(n+2) variant fails gate (" + num(variant) + ")");
    return o;
}

Outcome ac7() {
    Outcome o;
    const auto c = potential::solve_n2(ScalarFn::parse("1"), ScalarFn::parse("1"), +1, 1.0, 1e-3);
    double err = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(c.w[i] - c.t[i] * c.t[i] / 2));
    const double end = std::abs(c.w.back() - 0.5);
    o.require(c.t.back() == 1.0 && end <= 1e-12, "w(1) err " + num(end));
    o.require(err <= 1e-12, "sup err " + num(err));
    return o;
}

Outcome ac8() {
    Outcome o;
    const auto sol = ricci::solve(tensor("1", "1", 3, 10.0));
    o.require(sol.curve.halt == potential::PotentialCurve::Halt::ReachedEnd && sol.curve.t.back() == 10.0,
              std::string("halt ") + potential::to_string(sol.curve.halt));
    o.require(sol.global.verdict == potential::GlobalVerdict::GlobalContinuationExpected, sol.global.reason);
    const double res = std::max(sol.reconstruction.ricci.res_rr, sol.reconstruction.ricci.res_thth);
    o.require(res <= 1e-5, "residual " + num(res));
    return o;
}

Outcome ac9() {
    Outcome o;
    double worst = 0.0;
    auto track = [&](const rotsym::RotSymTensor& T) {
        const auto S = potential::SurfaceF::from(T);
        worst = std::max(worst, drift(S, potential::solve_separatrix(S, 1e-3, T.t_max)));
    };
    for (std::size_t n : {3u, 4u, 5u}) track(gold(n, 0.5));
    for (std::size_t n : {3u, 4u, 5u, 8u}) {
        track(tensor("1", "1", n, 10.0));
        track(tensor("-1", "-1", n, 2.0));
    }
    track(tensor("1 + t^2", "1 - t/3", 4, 1.0));
    track(tensor("2 + sin(t)", "2 + t^2", 3, 2.0));
    o.require(worst <= 1e-9, "drift " + num(worst));
    for (std::size_t n : {3u, 4u, 5u}) {
        const auto S = potential::SurfaceF::from(gold(n, 0.5));
        auto error = [&](double h) { return std::abs(potential::solve_separatrix(S, h, 0.5).w.back() - 0.5); };
        const double ratio = error(2e-3) / error(1e-3);
        o.require(ratio >= 8.0, "n=" + std::to_string(n) + " halving " + num(ratio));
    }
    return o;
}

tensorlab::Point rotate(const Matrix& q, const tensorlab::Point& x) { return q * x; }

Outcome ac10() {
    Outcome o;
    double sym = 0.0;
    for (const std::vector<double>& k : {std::vector<double>{0.3, -1.2, 2.0}, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}})
        sym = std::max(sym, check_riemann_symmetries(hypersurface::gauss_curvatures(k).riemann).worst());
    for (double r : {0.2, 0.6})
        sym = std::max(sym, check_riemann_symmetries(hypersurface::gauss_curvatures(hypersurface::principal_curvatures(
                                                         graph("sqrt(1 - u)", 0.9), r))
                                                         .riemann)
                                .worst());
    o.require(sym <= 1e-12, "riemann identities " + num(sym));

    const auto mf = hypersurface::cartesian_metric(graph("u/2 + u^2/5", 1.0));
    const auto gam = tensorlab::christoffel(mf, {0.21, -0.33, 0.4});
    bool exact = true;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) exact = exact && gam(k, i, j) == gam(k, j, i);
    o.require(exact, "christoffel symmetry exact");

    // rotation by 0.7 rad about (1, 2, 2)/3
    const double c = std::cos(0.7), s = std::sin(0.7);
    const double u[3] = {1.0 / 3, 2.0 / 3, 2.0 / 3};
    Matrix q(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) q(i, j) = (i == j ? c : 0.0) + (1 - c) * u[i] * u[j];
    q(0, 1) -= s * u[2];
    q(1, 0) += s * u[2];
    q(0, 2) += s * u[1];
    q(2, 0) -= s * u[1];
    q(1, 2) -= s * u[0];
    q(2, 1) += s * u[0];
    double equi = 0.0;
    const tensorlab::Point x{0.31, -0.22, 0.4};
    for (const auto& field : {mf, rotsym::cartesian_metric({3, expr::parse("-t^2/2"), expr::parse("t + t^3/5")},
                                                           rotsym::MetricConvention::ConformalSquared)}) {
        const SymMatrix at_qx = tensorlab::ricci_numeric(field, rotate(q, x));
        const SymMatrix rotated = congruence(tensorlab::ricci_numeric(field, x), q.transpose());
        equi = std::max(equi, max_diff(at_qx, rotated));
    }
    o.require(equi <= 1e-5, "rotation equivariance " + num(equi));
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= 10.0) o.require(false, "time " + num(secs) + " s");
        std::printf("%s %s (%.2f s) %s\n", name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
