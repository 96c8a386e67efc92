#pragma once

// Closed-form scalar functions of one variable: parser, printer and jet
// evaluator.
//
// Grammar (standard precedence, left-associative binary operators):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   integer := ['-'] DIGITS | '(' ['-'] DIGITS ')'
//   primary := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := sin | cos | exp | log | sqrt
//
// Exponents are integers only; fractional powers go through sqrt or
// exp/log.  The variable is named `t` unless another name is requested.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "ricci/error.hpp"
#include "ricci/jet.hpp"

namespace ricci::expr {

enum class Kind { Number, Pi, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double number = 0.0;   // Number
    int exponent = 0;      // Pow
    std::string name;      // Var
    NodePtr lhs;           // unary operand / left operand
    NodePtr rhs;           // right operand
};

inline bool is_function(Kind k) {
    return k == Kind::Sin || k == Kind::Cos || k == Kind::Exp || k == Kind::Log ||
           k == Kind::Sqrt;
}

inline bool is_binary(Kind k) {
    return k == Kind::Add || k == Kind::Sub || k == Kind::Mul || k == Kind::Div;
}

inline std::string to_string(const Node& n);

/// Immutable expression tree.  Cheap to copy; safe to share across threads.
class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    const Node& root() const { return *root_; }
    bool empty() const { return !root_; }
    std::string to_string() const { return expr::to_string(*root_); }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    NodePtr root_;
};

namespace detail {

inline NodePtr make(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

inline bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Kind::Number: return a.number == b.number;
    case Kind::Pi: return true;
    case Kind::Var: return a.name == b.name;
    case Kind::Pow: return a.exponent == b.exponent && same(*a.lhs, *b.lhs);
    default: break;
    }
    if (is_binary(a.kind)) return same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
    return same(*a.lhs, *b.lhs);
}

inline const char* function_name(Kind k) {
    switch (k) {
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Exp: return "exp";
    case Kind::Log: return "log";
    case Kind::Sqrt: return "sqrt";
    default: return "?";
    }
}

class Parser {
public:
    Parser(std::string_view src, std::string_view variable) : src_(src), var_(variable) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') throw ParseError("unmatched ')'", pos_);
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void unexpected() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }

    void expect(char c) {
        if (!accept(c)) {
            skip_ws();
            if (pos_ >= src_.size())
                throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::Add, lhs, parse_term());
            else if (accept('-')) lhs = make(Kind::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(Kind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make(Kind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(Kind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (!accept('^')) return base;
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->lhs = std::move(base);
        n->exponent = parse_integer();
        return n;
    }

    int parse_integer() {
        const bool paren = accept('(');
        const bool negative = accept('-');
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) {
            if (pos_ < src_.size() && (src_[pos_] == '.' || std::isalpha(static_cast<unsigned char>(src_[pos_]))))
                throw ParseError("exponent must be an integer literal", pos_);
            unexpected();
        }
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
            throw ParseError("exponent must be an integer literal", start);
        int value = 0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc()) throw ParseError("exponent out of range", start);
        if (paren) expect(')');
        return negative ? -value : value;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        unexpected();
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t d = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++d;
            }
            return d;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ParseError("malformed number", start);
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_)
            throw ParseError("malformed number", start);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Number;
        n->number = value;
        return n;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view id = src_.substr(start, pos_ - start);
        if (id == var_) {
            auto n = std::make_shared<Node>();
            n->kind = Kind::Var;
            n->name = std::string(id);
            return n;
        }
        if (id == "pi") return make(Kind::Pi);
        Kind k;
        if (id == "sin") k = Kind::Sin;
        else if (id == "cos") k = Kind::Cos;
        else if (id == "exp") k = Kind::Exp;
        else if (id == "log") k = Kind::Log;
        else if (id == "sqrt") k = Kind::Sqrt;
        else throw ParseError("unknown identifier '" + std::string(id) + "'", start);
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != '(')
            throw ParseError("expected '(' after function '" + std::string(id) + "'", pos_);
        ++pos_;
        NodePtr arg = parse_expr();
        expect(')');
        return make(k, arg);
    }

    std::string_view src_;
    std::string_view var_;
    std::size_t pos_ = 0;
};

template <std::size_t N>
Jet<N> eval_node(const Node& n, double t) {
    switch (n.kind) {
    case Kind::Number: return Jet<N>(n.number);
    case Kind::Pi: return Jet<N>(std::numbers::pi);
    case Kind::Var: return Jet<N>::variable(t);
    case Kind::Neg: return -eval_node<N>(*n.lhs, t);
    case Kind::Add: return eval_node<N>(*n.lhs, t) + eval_node<N>(*n.rhs, t);
    case Kind::Sub: return eval_node<N>(*n.lhs, t) - eval_node<N>(*n.rhs, t);
    case Kind::Mul: return eval_node<N>(*n.lhs, t) * eval_node<N>(*n.rhs, t);
    case Kind::Div: {
        const Jet<N> den = eval_node<N>(*n.rhs, t);
        if (den.value() == 0.0)
            throw DomainError("division by zero in '" + to_string(n) + "' at t = " + std::to_string(t));
        return eval_node<N>(*n.lhs, t) / den;
    }
    case Kind::Pow: {
        const Jet<N> base = eval_node<N>(*n.lhs, t);
        if (n.exponent < 0 && base.value() == 0.0)
            throw DomainError("division by zero in '" + to_string(n) + "' at t = " + std::to_string(t));
        return pow(base, n.exponent);
    }
    case Kind::Sin: return sin(eval_node<N>(*n.lhs, t));
    case Kind::Cos: return cos(eval_node<N>(*n.lhs, t));
    case Kind::Exp: return exp(eval_node<N>(*n.lhs, t));
    case Kind::Log: {
        const Jet<N> a = eval_node<N>(*n.lhs, t);
        if (!(a.value() > 0.0))
            throw DomainError("log of non-positive argument in '" + to_string(n) + "' at t = " + std::to_string(t));
        return log(a);
    }
    case Kind::Sqrt: {
        const Jet<N> a = eval_node<N>(*n.lhs, t);
        if (a.value() < 0.0 || std::isnan(a.value()))
            throw DomainError("sqrt of negative argument in '" + to_string(n) + "' at t = " + std::to_string(t));
        if (N >= 1 && a.value() == 0.0)
            throw DomainError("sqrt is not differentiable at zero in '" + to_string(n) + "' at t = " + std::to_string(t));
        return sqrt(a);
    }
    }
    throw Error("corrupt expression node");
}

} // namespace detail

/// Fully parenthesized text form; parsing it yields an identical tree.
inline std::string to_string(const Node& n) {
    switch (n.kind) {
    case Kind::Number: {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.number);
        return std::string(buf, ptr);
    }
    case Kind::Pi: return "pi";
    case Kind::Var: return n.name;
    case Kind::Neg: return "(-" + to_string(*n.lhs) + ")";
    case Kind::Add: return "(" + to_string(*n.lhs) + " + " + to_string(*n.rhs) + ")";
    case Kind::Sub: return "(" + to_string(*n.lhs) + " - " + to_string(*n.rhs) + ")";
    case Kind::Mul: return "(" + to_string(*n.lhs) + " * " + to_string(*n.rhs) + ")";
    case Kind::Div: return "(" + to_string(*n.lhs) + " / " + to_string(*n.rhs) + ")";
    case Kind::Pow:
        return "(" + to_string(*n.lhs) + "^" +
               (n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent)) + ")";
    default: return std::string(detail::function_name(n.kind)) + "(" + to_string(*n.lhs) + ")";
    }
}

inline bool operator==(const Expr& a, const Expr& b) {
    if (a.empty() || b.empty()) return a.empty() == b.empty();
    return detail::same(*a.root_, *b.root_);
}

/// Parses `src`; throws ParseError with the offending position.
inline Expr parse(std::string_view src, std::string_view variable = "t") {
    return Expr(detail::Parser(src, variable).parse());
}

/// Value and the first N derivatives at t.  Throws DomainError naming the
/// offending subexpression.
template <std::size_t N>
Jet<N> eval(const Expr& e, double t) {
    return detail::eval_node<N>(e.root(), t);
}

inline Jet2 eval_jet2(const Expr& e, double t) { return eval<2>(e, t); }

inline double eval_value(const Expr& e, double t) { return eval<0>(e, t).value(); }

} // namespace ricci::expr
