#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "checked_int.hpp"

namespace hcp {

// Exact rational with 128-bit checked numerator/denominator, always reduced,
// denominator > 0.
struct Rational {
    i128 num = 0;
    i128 den = 1;

    Rational() = default;
    Rational(i128 n) : num(n), den(1) {}
    Rational(i128 n, i128 d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i128 g = gcd128(num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return {checked_add(checked_mul(a.num, b.den), checked_mul(b.num, a.den)),
                checked_mul(a.den, b.den)};
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return {checked_sub(checked_mul(a.num, b.den), checked_mul(b.num, a.den)),
                checked_mul(a.den, b.den)};
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return {checked_mul(a.num, b.num), checked_mul(a.den, b.den)};
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::domain_error("rational division by zero");
        return {checked_mul(a.num, b.den), checked_mul(a.den, b.num)};
    }
    Rational operator-() const {
        Rational r;
        r.num = -num;
        r.den = den;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        i128 lhs = checked_mul(a.num, b.den);
        i128 rhs = checked_mul(b.num, a.den);
        return lhs < rhs ? std::strong_ordering::less
             : lhs > rhs ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
    }

    bool is_zero() const { return num == 0; }
    int sign() const { return sgn(num); }
    double to_double() const { return hcp::to_double(num) / hcp::to_double(den); }
    std::string str() const {
        return den == 1 ? hcp::to_string(num) : hcp::to_string(num) + "/" + hcp::to_string(den);
    }
};

inline Rational rational_abs(const Rational& a) { return a.num < 0 ? -a : a; }

// Rational in [lo, hi] with the smallest denominator (Stern-Brocot descent).
// Keeps quadrature-node coordinates small so downstream exact arithmetic
// stays far from the 128-bit ceiling.
inline Rational simplest_rational_between(double lo, double hi) {
    if (!(lo <= hi)) throw std::domain_error("simplest_rational_between: empty interval");
    if (lo <= 0 && hi >= 0) return Rational(0);
    if (hi < 0) {
        Rational r = simplest_rational_between(-hi, -lo);
        return -r;
    }
    // 0 < lo <= hi: walk the continued fraction of the interval.
    i128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double a = lo, b = hi;
    for (int iter = 0; iter < 128; ++iter) {
        double fa = std::floor(a);
        i128 k;
        if (a == fa) k = static_cast<i128>(fa);          // a itself is "integral" at this level
        else if (fa + 1.0 <= b) k = static_cast<i128>(fa) + 1; // an integer lies inside
        else k = -1;
        if (k >= 0) return {k * p1 + p0, k * q1 + q0};
        i128 c = static_cast<i128>(fa);
        i128 p = c * p1 + p0, q = c * q1 + q0;
        p0 = p1; q0 = q1; p1 = p; q1 = q;
        double na = 1.0 / (b - fa), nb = 1.0 / (a - fa);
        a = na; b = nb;
    }
    // Fallback: interval too tight for double CF walk; use midpoint dyadic.
    double mid = 0.5 * (lo + hi);
    i128 den = 1;
    while (to_double(den) * (hi - lo) < 4 && den < (i128(1) << 60)) den <<= 1;
    return {static_cast<i128>(std::llround(mid * to_double(den))), den};
}

} // namespace hcp
