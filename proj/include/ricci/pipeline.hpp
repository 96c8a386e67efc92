#pragma once

// End-to-end solve: definiteness gate -> separatrix (or the n = 2
// quadrature) -> reconstruction -> residuals and global margins.

#include <algorithm>
#include <cmath>
#include <optional>

#include "ricci/error.hpp"
#include "ricci/potential.hpp"
#include "ricci/reconstruct.hpp"
#include "ricci/rotsym.hpp"

namespace ricci {

/// The tensor failed the definiteness gate (singular or phi(0) != psi(0)).
class ValidationError : public Error {
public:
    explicit ValidationError(rotsym::Definiteness d) : Error(d.reason), verdict_(std::move(d)) {}
    const rotsym::Definiteness& verdict() const { return verdict_; }

private:
    rotsym::Definiteness verdict_;
};

struct SolveOptions {
    double step = 1e-3;
    double delta = 0.0; ///< seed offset; 0 selects 1e-4 * t_max
    double t_lo = 0.0;  ///< residual window start; 0 selects 0.05 * t_max
    std::size_t definiteness_grid = 256;
};

struct Solution {
    rotsym::Definiteness definiteness;
    std::optional<potential::SaddleReport> saddle; ///< absent for n = 2
    potential::PotentialCurve curve;
    reconstruct::ReconstructionResult reconstruction;
    potential::GlobalReport global;
    double max_constraint = 0.0; ///< max |F| along the curve
};

inline double max_constraint(const potential::SurfaceF& S, const potential::PotentialCurve& c) {
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        m = std::max(m, std::abs(potential::surface_eval(S, c.t[i], c.w[i], c.p[i]).F));
    return m;
}

inline Solution solve(const rotsym::RotSymTensor& T, const SolveOptions& opt = {}) {
    Solution sol;
    sol.definiteness = rotsym::definiteness_check(T, opt.definiteness_grid);
    if (!sol.definiteness.nonsingular()) throw ValidationError(sol.definiteness);
    const potential::SurfaceF S = potential::SurfaceF::from(T);
    if (T.n == 2) {
        const int sign = sol.definiteness.phi0 > 0.0 ? +1 : -1;
        sol.curve = potential::solve_n2(T.phi, T.psi, sign, T.t_max, opt.step);
    } else {
        sol.saddle = potential::saddle_report(S);
        const double delta = opt.delta > 0.0 ? opt.delta : 1e-4 * T.t_max;
        sol.curve = potential::solve_separatrix(S, opt.step, T.t_max, delta);
    }
    sol.max_constraint = max_constraint(S, sol.curve);
    const double t_last = sol.curve.t.back();
    const double t_lo = opt.t_lo > 0.0 ? opt.t_lo : 0.05 * t_last;
    sol.reconstruction = reconstruct::reconstruct(sol.curve, T, t_lo);
    sol.global = potential::check_global(S, sol.curve);
    return sol;
}

} // namespace ricci
