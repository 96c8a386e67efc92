#pragma once

// Truncated Taylor arithmetic ("jets") for forward-mode differentiation of
// scalar functions of one variable.
//
// A Jet<N> stores the normalized Taylor coefficients c_k = f^(k)(t0) / k!
// for k = 0..N.  All operations are exact up to floating-point rounding in
// the retained orders; nothing is approximated by differencing.

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace ricci {

template <std::size_t N>
class Jet {
public:
    static constexpr std::size_t order = N;

    constexpr Jet() = default;
    constexpr Jet(double value) { c_[0] = value; } // NOLINT: implicit from constant

    /// Jet of the identity function evaluated at t.
    static constexpr Jet variable(double t) {
        Jet j(t);
        if constexpr (N >= 1) j.c_[1] = 1.0;
        return j;
    }

    /// Builds a jet from derivative values (f, f', f'', ...).
    static constexpr Jet from_derivatives(const std::array<double, N + 1>& d) {
        Jet j;
        double fact = 1.0;
        for (std::size_t k = 0; k <= N; ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            j.c_[k] = d[k] / fact;
        }
        return j;
    }

    constexpr double coeff(std::size_t k) const { return c_[k]; }
    constexpr double& coeff(std::size_t k) { return c_[k]; }

    constexpr double value() const { return c_[0]; }

    /// k-th derivative, k <= N.
    constexpr double derivative(std::size_t k) const {
        double fact = 1.0;
        for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
        return c_[k] * fact;
    }

    // Short names used throughout for second-order jets.
    constexpr double v() const { return value(); }
    constexpr double d1() const requires(N >= 1) { return c_[1]; }
    constexpr double d2() const requires(N >= 2) { return 2.0 * c_[2]; }

    constexpr Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k <= N; ++k) c_[k] += o.c_[k];
        return *this;
    }
    constexpr Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k <= N; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    constexpr Jet& operator*=(const Jet& o) { return *this = *this * o; }
    constexpr Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend constexpr Jet operator-(Jet a) {
        for (auto& c : a.c_) c = -c;
        return a;
    }
    friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }

    friend constexpr Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }

    friend constexpr Jet operator/(const Jet& a, const Jet& b) {
        Jet q;
        for (std::size_t k = 0; k <= N; ++k) {
            double s = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
            q.c_[k] = s / b.c_[0];
        }
        return q;
    }

    friend bool operator==(const Jet&, const Jet&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
        os << '(';
        for (std::size_t k = 0; k <= N; ++k) os << (k ? ", " : "") << j.derivative(k);
        return os << ')';
    }

private:
    std::array<double, N + 1> c_{};
};

using Jet2 = Jet<2>;

/// Derivative of a jet, losing one order.
template <std::size_t N>
constexpr Jet<N - 1> differentiate(const Jet<N>& a) requires(N >= 1) {
    Jet<N - 1> r;
    for (std::size_t k = 0; k + 1 <= N; ++k)
        r.coeff(k) = static_cast<double>(k + 1) * a.coeff(k + 1);
    return r;
}

/// Drops the highest orders.
template <std::size_t M, std::size_t N>
constexpr Jet<M> truncate(const Jet<N>& a) requires(M <= N) {
    Jet<M> r;
    for (std::size_t k = 0; k <= M; ++k) r.coeff(k) = a.coeff(k);
    return r;
}

/// Re-expands a jet at t0 to a jet at t0 + s using its Taylor polynomial.
template <std::size_t N>
constexpr Jet<N> shift(const Jet<N>& a, double s) {
    Jet<N> r;
    // coefficient k of the shifted polynomial: sum_{j>=k} C(j,k) a_j s^(j-k)
    for (std::size_t k = 0; k <= N; ++k) {
        double sum = 0.0;
        double binom = 1.0;
        double pw = 1.0;
        for (std::size_t j = k; j <= N; ++j) {
            sum += binom * a.coeff(j) * pw;
            binom = binom * static_cast<double>(j + 1) / static_cast<double>(j + 1 - k);
            pw *= s;
        }
        r.coeff(k) = sum;
    }
    return r;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
    Jet<N> e;
    e.coeff(0) = std::exp(a.coeff(0));
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            s += static_cast<double>(j) * a.coeff(j) * e.coeff(k - j);
        e.coeff(k) = s / static_cast<double>(k);
    }
    return e;
}

/// Natural logarithm; a.value() must be positive.
template <std::size_t N>
Jet<N> log(const Jet<N>& a) {
    Jet<N> l;
    l.coeff(0) = std::log(a.coeff(0));
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < k; ++j)
            s += static_cast<double>(j) * l.coeff(j) * a.coeff(k - j);
        l.coeff(k) = (a.coeff(k) - s / static_cast<double>(k)) / a.coeff(0);
    }
    return l;
}

template <std::size_t N>
void sincos(const Jet<N>& a, Jet<N>& s, Jet<N>& c) {
    s = Jet<N>();
    c = Jet<N>();
    s.coeff(0) = std::sin(a.coeff(0));
    c.coeff(0) = std::cos(a.coeff(0));
    for (std::size_t k = 1; k <= N; ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const double ja = static_cast<double>(j) * a.coeff(j);
            ss += ja * c.coeff(k - j);
            cc -= ja * s.coeff(k - j);
        }
        s.coeff(k) = ss / static_cast<double>(k);
        c.coeff(k) = cc / static_cast<double>(k);
    }
}

template <std::size_t N>
Jet<N> sin(const Jet<N>& a) {
    Jet<N> s, c;
    sincos(a, s, c);
    return s;
}

template <std::size_t N>
Jet<N> cos(const Jet<N>& a) {
    Jet<N> s, c;
    sincos(a, s, c);
    return c;
}

/// Square root; a.value() must be positive when N >= 1.
template <std::size_t N>
Jet<N> sqrt(const Jet<N>& a) {
    Jet<N> q;
    q.coeff(0) = std::sqrt(a.coeff(0));
    for (std::size_t k = 1; k <= N; ++k) {
        double s = a.coeff(k);
        for (std::size_t j = 1; j < k; ++j) s -= q.coeff(j) * q.coeff(k - j);
        q.coeff(k) = s / (2.0 * q.coeff(0));
    }
    return q;
}

/// Integer power by repeated squaring; negative exponents go through a
/// reciprocal, so a.value() must be nonzero for them.
template <std::size_t N>
Jet<N> pow(const Jet<N>& a, int exponent) {
    if (exponent < 0) return Jet<N>(1.0) / pow(a, -exponent);
    Jet<N> result(1.0);
    Jet<N> base = a;
    auto e = static_cast<unsigned>(exponent);
    while (e != 0) {
        if (e & 1u) result *= base;
        e >>= 1;
        if (e != 0) base *= base;
    }
    return result;
}

} // namespace ricci
