#pragma once

#include <functional>
#include <string>
#include <utility>

#include "ricci/expr.hpp"
#include "ricci/jet.hpp"

namespace ricci {

/// A scalar function of one real variable that can be evaluated as a
/// second-order jet.  Backed either by a parsed expression or by an
/// arbitrary callable (e.g. a tensor computed from a metric profile).
class ScalarFn {
public:
    using Callable = std::function<Jet2(double)>;

    ScalarFn() : ScalarFn(0.0) {}

    ScalarFn(double constant) // NOLINT: implicit from constant
        : fn_([constant](double) { return Jet2(constant); }), label_(format_constant(constant)) {}

    explicit ScalarFn(expr::Expr e)
        : fn_([e](double t) { return expr::eval_jet2(e, t); }), label_(e.to_string()), expr_(std::move(e)) {}

    ScalarFn(Callable fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

    /// Parses `src` as an expression in t.
    static ScalarFn parse(std::string_view src) { return ScalarFn(expr::parse(src)); }

    Jet2 operator()(double t) const { return fn_(t); }
    double value(double t) const { return fn_(t).v(); }

    const std::string& label() const { return label_; }

    /// The underlying expression, when there is one.
    const expr::Expr* expression() const { return expr_.empty() ? nullptr : &expr_; }

private:
    static std::string format_constant(double c) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);
        return std::string(buf, ptr);
    }

    Callable fn_;
    std::string label_;
    expr::Expr expr_;
};

} // namespace ricci
