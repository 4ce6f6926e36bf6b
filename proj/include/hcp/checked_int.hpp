#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hcp {

using i128 = __int128;

// Raised when a 128-bit intermediate would wrap.  All exact-arithmetic
// paths are checked; callers that need bigger numbers must rescale.
struct overflow_error : std::runtime_error {
    overflow_error() : std::runtime_error("128-bit integer overflow") {}
    explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw overflow_error();
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw overflow_error();
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw overflow_error();
    return r;
}

inline i128 iabs(i128 a) { return a < 0 ? -a : a; }

inline int sgn(i128 a) { return (a > 0) - (a < 0); }

inline i128 gcd128(i128 a, i128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended gcd: returns g = gcd(a,b) and (x,y) with a*x + b*y = g.
inline i128 ext_gcd(i128 a, i128 b, i128& x, i128& y) {
    i128 old_r = a, r = b;
    i128 old_x = 1, xx = 0;
    i128 old_y = 0, yy = 1;
    while (r != 0) {
        i128 q = old_r / r;
        i128 t;
        t = old_r - q * r; old_r = r; r = t;
        t = old_x - q * xx; old_x = xx; xx = t;
        t = old_y - q * yy; old_y = yy; yy = t;
    }
    if (old_r < 0) { old_r = -old_r; old_x = -old_x; old_y = -old_y; }
    x = old_x;
    y = old_y;
    return old_r;
}

inline double to_double(i128 v) { return static_cast<double>(v); }

// Floor of sqrt(n) for n >= 0, exact.
inline i128 isqrt(i128 n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    if (n == 0) return 0;
    i128 r = static_cast<i128>(std::sqrt(to_double(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square(i128 n) {
    if (n < 0) return false;
    i128 r = isqrt(n);
    return r * r == n;
}

// floor(a/b) for b != 0.
inline i128 floor_div(i128 a, i128 b) {
    i128 q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

// Number of divisors of |n|, n != 0.
inline long long divisor_count(i128 n) {
    n = iabs(n);
    if (n == 0) throw std::domain_error("divisor_count(0)");
    long long cnt = 1;
    for (i128 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            cnt *= e + 1;
        }
    }
    if (n > 1) cnt *= 2;
    return cnt;
}

// Largest k with k^2 | n (n != 0).
inline i128 square_part(i128 n) {
    n = iabs(n);
    if (n == 0) throw std::domain_error("square_part(0)");
    i128 k = 1;
    for (i128 p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        for (int i = 0; i < e / 2; ++i) k *= p;
    }
    return k;
}

} // namespace hcp
