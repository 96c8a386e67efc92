#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "ricci/error.hpp"
#include "ricci/expr.hpp"
#include "ricci/jet.hpp"
#include "ricci/scalar_fn.hpp"

using namespace ricci;
using expr::Kind;

namespace {

// Value-only evaluator in long double, written against the tree shape
// alone.  Finite differences of it are the derivative oracle.
long double oracle(const expr::Node& n, long double t) {
    switch (n.kind) {
    case Kind::Number: return n.number;
    case Kind::Pi: return std::numbers::pi_v<long double>;
    case Kind::Var: return t;
    case Kind::Neg: return -oracle(*n.lhs, t);
    case Kind::Add: return oracle(*n.lhs, t) + oracle(*n.rhs, t);
    case Kind::Sub: return oracle(*n.lhs, t) - oracle(*n.rhs, t);
    case Kind::Mul: return oracle(*n.lhs, t) * oracle(*n.rhs, t);
    case Kind::Div: return oracle(*n.lhs, t) / oracle(*n.rhs, t);
    case Kind::Pow: return std::pow(oracle(*n.lhs, t), static_cast<long double>(n.exponent));
    case Kind::Sin: return std::sin(oracle(*n.lhs, t));
    case Kind::Cos: return std::cos(oracle(*n.lhs, t));
    case Kind::Exp: return std::exp(oracle(*n.lhs, t));
    case Kind::Log: return std::log(oracle(*n.lhs, t));
    case Kind::Sqrt: return std::sqrt(oracle(*n.lhs, t));
    }
    return 0;
}

struct Fd {
    double d1, d2;
};

Fd finite_differences(const expr::Expr& e, double t, long double h = 1e-5L) {
    const long double fp = oracle(e.root(), t + h);
    const long double f0 = oracle(e.root(), t);
    const long double fm = oracle(e.root(), t - h);
    return {static_cast<double>((fp - fm) / (2 * h)), static_cast<double>((fp - 2 * f0 + fm) / (h * h))};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Random expressions whose domain contains every real t.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    auto lit = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", coef(rng));
        return std::string(buf[0] == '-' ? "(" + std::string(buf) + ")" : buf);
    };
    const auto sub = [&] { return random_expr(rng, depth - 1); };
    switch (pick(rng)) {
    case 0: return "t";
    case 1: return lit();
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return sub() + " * " + sub();
    case 5: return "(" + sub() + ") / (1.5 + (" + sub() + ")^2)";
    case 6: return "(" + sub() + ")^" + std::to_string(std::uniform_int_distribution<int>(0, 3)(rng));
    case 7: return "sin(" + sub() + ")";
    case 8: return "cos(" + sub() + ")";
    case 9: return "exp(0.3 * sin(" + sub() + "))";
    case 10: return "log(2 + (" + sub() + ")^2)";
    default: return "sqrt(1 + (" + sub() + ")^2)";
    }
}

} // namespace

TEST(Jet, ProductRule) {
    const Jet2 a = Jet2::from_derivatives({2.0, 3.0, 5.0});
    const Jet2 b = Jet2::from_derivatives({7.0, 11.0, 13.0});
    const Jet2 c = a * b;
    EXPECT_DOUBLE_EQ(c.v(), 14.0);
    EXPECT_DOUBLE_EQ(c.d1(), 3.0 * 7.0 + 2.0 * 11.0);
    EXPECT_DOUBLE_EQ(c.d2(), 5.0 * 7.0 + 2.0 * 3.0 * 11.0 + 2.0 * 13.0);
}

TEST(Jet, QuotientMatchesProductInverse) {
    const Jet2 a = Jet2::from_derivatives({2.0, -1.0, 0.5});
    const Jet2 b = Jet2::from_derivatives({3.0, 0.25, -2.0});
    const Jet2 q = a / b;
    const Jet2 back = q * b;
    for (std::size_t k = 0; k <= 2; ++k) EXPECT_NEAR(back.coeff(k), a.coeff(k), 1e-15);
}

TEST(Jet, HigherOrderSeries) {
    const auto e = exp(Jet<5>::variable(0.0));
    for (std::size_t k = 0; k <= 5; ++k) EXPECT_NEAR(e.derivative(k), 1.0, 1e-15);
    const auto s = sin(Jet<4>::variable(0.0));
    EXPECT_DOUBLE_EQ(s.derivative(3), -1.0);
    EXPECT_DOUBLE_EQ(s.derivative(4), 0.0);
}

TEST(Jet, SqrtAndLogAreInverses) {
    const Jet<3> x = Jet<3>::variable(1.7) * 2.0;
    const Jet<3> y = sqrt(x) * sqrt(x);
    const Jet<3> z = exp(log(x));
    for (std::size_t k = 0; k <= 3; ++k) {
        EXPECT_NEAR(y.coeff(k), x.coeff(k), 1e-14);
        EXPECT_NEAR(z.coeff(k), x.coeff(k), 1e-14);
    }
}

TEST(Jet, IntegerPowerMatchesRepeatedProduct) {
    const Jet<3> x = Jet<3>::variable(0.8);
    const Jet<3> p = pow(x, 4);
    const Jet<3> q = x * x * x * x;
    const Jet<3> inv = pow(x, -2) * x * x;
    for (std::size_t k = 0; k <= 3; ++k) {
        EXPECT_NEAR(p.coeff(k), q.coeff(k), 1e-15);
        EXPECT_NEAR(inv.coeff(k), k == 0 ? 1.0 : 0.0, 1e-14);
    }
}

TEST(Jet, DifferentiateAndShift) {
    // t^3 around 2: coefficients 8, 12, 6, 1
    const Jet<3> x = Jet<3>::variable(2.0);
    const Jet<3> c = x * x * x;
    const Jet<2> d = differentiate(c);
    EXPECT_DOUBLE_EQ(d.v(), 12.0);
    EXPECT_DOUBLE_EQ(d.d1(), 12.0);
    const Jet<3> s = shift(c, 1.0); // expansion around 3
    EXPECT_NEAR(s.value(), 27.0, 1e-13);
    EXPECT_NEAR(s.derivative(1), 27.0, 1e-13);
    EXPECT_DOUBLE_EQ(truncate<1>(c).coeff(1), 12.0);
}

TEST(Parse, PrecedenceShapes) {
    const auto a = expr::parse("1 + t^2");
    ASSERT_EQ(a.root().kind, Kind::Add);
    EXPECT_EQ(a.root().lhs->kind, Kind::Number);
    EXPECT_EQ(a.root().rhs->kind, Kind::Pow);
    EXPECT_EQ(a.root().rhs->exponent, 2);
    EXPECT_EQ(a.root().rhs->lhs->kind, Kind::Var);

    const auto b = expr::parse("sin(t)*exp(t)");
    ASSERT_EQ(b.root().kind, Kind::Mul);
    EXPECT_EQ(b.root().lhs->kind, Kind::Sin);
    EXPECT_EQ(b.root().rhs->kind, Kind::Exp);
}

TEST(Parse, UnaryMinusBindsLooserThanPower) {
    const auto e = expr::parse("-t^2");
    ASSERT_EQ(e.root().kind, Kind::Neg);
    EXPECT_EQ(e.root().lhs->kind, Kind::Pow);
    EXPECT_DOUBLE_EQ(expr::eval_value(e, 3.0), -9.0);
}

TEST(Parse, LeftAssociative) {
    EXPECT_DOUBLE_EQ(expr::eval_value(expr::parse("8 - 4 - 2"), 0.0), 2.0);
    EXPECT_DOUBLE_EQ(expr::eval_value(expr::parse("8 / 4 / 2"), 0.0), 1.0);
    EXPECT_DOUBLE_EQ(expr::eval_value(expr::parse("2 * 3 + 4 * 5"), 0.0), 26.0);
}

TEST(Parse, PiAndScientificLiterals) {
    EXPECT_DOUBLE_EQ(expr::eval_value(expr::parse("pi"), 0.0), std::numbers::pi);
    EXPECT_DOUBLE_EQ(expr::eval_value(expr::parse("1.5e-3 * t"), 2.0), 3e-3);
}

TEST(Parse, CustomVariableName) {
    const auto e = expr::parse("sqrt(1 - u)", "u");
    EXPECT_DOUBLE_EQ(expr::eval_value(e, 0.75), 0.5);
    EXPECT_THROW(expr::parse("sqrt(1 - t)", "u"), ParseError);
}

namespace {

std::string parse_error(const std::string& src) {
    try {
        expr::parse(src);
    } catch (const ParseError& e) {
        return e.reason() + "@" + std::to_string(e.position());
    }
    return "no error";
}

} // namespace

TEST(Parse, Errors) {
    EXPECT_EQ(parse_error("1 +"), "unexpected end of input@3");
    EXPECT_EQ(parse_error(""), "empty expression@0");
    EXPECT_EQ(parse_error("(1 + t"), "expected ')' before end of input@6");
    EXPECT_EQ(parse_error("1 + t)"), "unmatched ')'@5");
    EXPECT_EQ(parse_error("foo(t)"), "unknown identifier 'foo'@0");
    EXPECT_EQ(parse_error("t^1.5"), "exponent must be an integer literal@2");
    EXPECT_EQ(parse_error("t ** 2"), "unexpected '*'@3");
    EXPECT_EQ(parse_error("2 t"), "unexpected 't'@2");
}

TEST(Eval, SpecExamples) {
    const Jet2 a = expr::eval_jet2(expr::parse("t^2"), 3.0);
    EXPECT_DOUBLE_EQ(a.v(), 9.0);
    EXPECT_DOUBLE_EQ(a.d1(), 6.0);
    EXPECT_DOUBLE_EQ(a.d2(), 2.0);
    const Jet2 b = expr::eval_jet2(expr::parse("sin(t)"), 0.0);
    EXPECT_DOUBLE_EQ(b.v(), 0.0);
    EXPECT_DOUBLE_EQ(b.d1(), 1.0);
    EXPECT_DOUBLE_EQ(b.d2(), 0.0);
    const auto e = expr::parse("exp(2*t)");
    const Jet2 c = expr::eval_jet2(e, 0.5);
    const double h = 1e-5;
    const double fd = (expr::eval_value(e, 0.5 + h) - expr::eval_value(e, 0.5 - h)) / (2 * h);
    EXPECT_LE(std::abs(c.d1() - fd) / std::abs(fd), 1e-8);
}

TEST(Eval, DomainErrorsNameTheSubexpression) {
    auto message = [](const std::string& src, double t) -> std::string {
        try {
            expr::eval_jet2(expr::parse(src), t);
        } catch (const DomainError& e) {
            return e.what();
        }
        return "no error";
    };
    EXPECT_NE(message("1 + log(t - 1)", 0.5).find("log((t - 1))"), std::string::npos);
    EXPECT_NE(message("2 / (t - 1)", 1.0).find("division by zero"), std::string::npos);
    EXPECT_NE(message("t^(-1)", 0.0).find("division by zero"), std::string::npos);
    EXPECT_NE(message("sqrt(t)", -1.0).find("sqrt"), std::string::npos);
    EXPECT_NO_THROW(expr::eval_value(expr::parse("sqrt(t)"), 0.0));
}

TEST(Eval, RandomExpressionsAgreeWithFiniteDifferences) {
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> tdist(-1.5, 1.5);
    int checked = 0;
    while (checked < 200) {
        const std::string src = random_expr(rng, 4);
        const auto e = expr::parse(src);
        const double t = tdist(rng);
        const Jet2 j = expr::eval_jet2(e, t);
        const Fd fd = finite_differences(e, t);
        SCOPED_TRACE(src + " at t = " + std::to_string(t));
        EXPECT_LE(rel(j.v(), static_cast<double>(oracle(e.root(), t))), 1e-12);
        EXPECT_LE(rel(j.d1(), fd.d1), 1e-6);
        EXPECT_LE(rel(j.d2(), fd.d2), 1e-6);
        ++checked;
    }
}

TEST(Eval, ChainRuleOnNestedExpressions) {
    // f(g(t)) with g = t^2 + 1 and f = sin: (f o g)' = f'(g) g', (f o g)'' = f''(g) g'^2 + f'(g) g''
    const double t = 0.7;
    const Jet2 g = expr::eval_jet2(expr::parse("t^2 + 1"), t);
    const Jet2 composed = expr::eval_jet2(expr::parse("sin(t^2 + 1)"), t);
    const Jet2 outer = expr::eval_jet2(expr::parse("sin(t)"), g.v());
    EXPECT_NEAR(composed.v(), outer.v(), 1e-15);
    EXPECT_NEAR(composed.d1(), outer.d1() * g.d1(), 1e-14);
    EXPECT_NEAR(composed.d2(), outer.d2() * g.d1() * g.d1() + outer.d1() * g.d2(), 1e-14);

    const Jet2 deep = expr::eval_jet2(expr::parse("exp(cos(log(2 + t^2)))"), t);
    const Fd fd = finite_differences(expr::parse("exp(cos(log(2 + t^2)))"), t);
    EXPECT_LE(rel(deep.d1(), fd.d1), 1e-8);
    EXPECT_LE(rel(deep.d2(), fd.d2), 1e-7);
}

TEST(Eval, DeterministicAcrossCalls) {
    const auto e = expr::parse("exp(t) * sin(3*t) / (1 + t^2)");
    const Jet2 a = expr::eval_jet2(e, 0.37);
    const Jet2 b = expr::eval_jet2(e, 0.37);
    EXPECT_EQ(a, b);
}

TEST(Roundtrip, UnparseReparseIsStructurallyIdentical) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto e = expr::parse(random_expr(rng, 5));
        const auto again = expr::parse(e.to_string());
        ASSERT_TRUE(e == again) << e.to_string();
        EXPECT_EQ(again.to_string(), e.to_string());
    }
    for (const char* src : {"-t^2", "t^(-3)", "-(-t)", "2*pi - 1e-300", "0.1 + 0.2"}) {
        const auto e = expr::parse(src);
        EXPECT_TRUE(e == expr::parse(e.to_string())) << src;
    }
}

TEST(ScalarFn, ConstantAndCallable) {
    const ScalarFn c(2.5);
    EXPECT_DOUBLE_EQ(c.value(10.0), 2.5);
    EXPECT_DOUBLE_EQ(c(1.0).d1(), 0.0);
    const ScalarFn f = ScalarFn::parse("t^3");
    EXPECT_DOUBLE_EQ(f(2.0).d2(), 12.0);
    ASSERT_NE(f.expression(), nullptr);
    EXPECT_EQ(c.expression(), nullptr);
    const ScalarFn g([](double t) { return Jet2::variable(t) * 2.0; }, "2t");
    EXPECT_EQ(g.label(), "2t");
    EXPECT_DOUBLE_EQ(g(1.0).d1(), 2.0);
}
