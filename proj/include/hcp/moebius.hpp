#pragma once

#include <functional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "checked_int.hpp"
#include "rational.hpp"

namespace hcp {

struct GroupElement {
    i128 a = 1, b = 0, c = 0, d = 1;

    i128 det() const {
        return checked_sub(checked_mul(a, d), checked_mul(b, c));
    }
    i128 trace() const { return checked_add(a, d); }

    // PSL2 representative: c > 0, or c = 0 and d > 0.
    GroupElement normalized() const {
        if (c > 0 || (c == 0 && d > 0)) return *this;
        return {-a, -b, -c, -d};
    }
    GroupElement inverse() const { return {d, -b, -c, a}; }

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    friend auto operator<=>(const GroupElement& g, const GroupElement& h) {
        return std::tie(g.c, g.d, g.a, g.b) <=> std::tie(h.c, h.d, h.a, h.b);
    }
};

inline const GroupElement kIdentity{1, 0, 0, 1};
inline const GroupElement kS{0, -1, 1, 0};
inline const GroupElement kT{1, 1, 0, 1};

inline GroupElement compose(const GroupElement& g, const GroupElement& h) {
    return {checked_add(checked_mul(g.a, h.a), checked_mul(g.b, h.c)),
            checked_add(checked_mul(g.a, h.b), checked_mul(g.b, h.d)),
            checked_add(checked_mul(g.c, h.a), checked_mul(g.d, h.c)),
            checked_add(checked_mul(g.c, h.b), checked_mul(g.d, h.d))};
}

inline GroupElement power(GroupElement g, long long n) {
    if (n < 0) { g = g.inverse(); n = -n; }
    GroupElement r = kIdentity;
    while (n) {
        if (n & 1) r = compose(r, g);
        g = compose(g, g);
        n >>= 1;
    }
    return r;
}

struct HPoint {
    Rational x, y;

    HPoint() : x(0), y(1) {}
    HPoint(Rational px, Rational py) : x(px), y(py) {
        if (!(y.sign() > 0)) throw std::domain_error("HPoint needs y > 0");
    }
    friend bool operator==(const HPoint&, const HPoint&) = default;
};

// z -> (az+b)/(cz+d); exact.
inline HPoint apply(const GroupElement& g, const HPoint& z) {
    // cz+d = (cx+d) + i cy; |cz+d|^2 = (cx+d)^2 + (cy)^2
    Rational cr = Rational(g.c) * z.x + Rational(g.d);
    Rational ci = Rational(g.c) * z.y;
    Rational ar = Rational(g.a) * z.x + Rational(g.b);
    Rational ai = Rational(g.a) * z.y;
    Rational n2 = cr * cr + ci * ci;
    return {(ar * cr + ai * ci) / n2, z.y / n2}; // Im = y/|cz+d|^2 since det=1
}

// u(z,w) = |z-w|^2 / (4 Im z Im w); exact.
inline Rational point_pair_u(const HPoint& z, const HPoint& w) {
    Rational dx = z.x - w.x, dy = z.y - w.y;
    return (dx * dx + dy * dy) / (Rational(4) * z.y * w.y);
}

struct BallEntry {
    GroupElement element; // normalized PSL2 representative
    Rational u_value;
    long long trace = 0; // |a+d| for hyperbolic entries, a+d of the rep otherwise
};

struct resource_cap_error : std::runtime_error {
    explicit resource_cap_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Scaled integer data for a point z = (x0 + i*y0)/m.
struct ScaledPoint {
    i128 x0, y0, m;
    explicit ScaledPoint(const HPoint& z) {
        m = checked_mul(z.x.den / gcd128(z.x.den, z.y.den), z.y.den);
        x0 = checked_mul(z.x.num, m / z.x.den);
        y0 = checked_mul(z.y.num, m / z.y.den);
    }
};

// Visits every coprime bottom row (c,d), c >= 0 normalized, with
// Xd*((c x0 + d m)^2 + (c y0)^2) <= Xn*m^2, i.e. |cz+d|^2 <= X.
// For each row reports the full admissible translate interval [nlo, nhi]
// of a = a0 + n c, b = b0 + n d solving 4u(gz,z)+2 <= X.
template <class RowFn>
void scan_rows(const ScaledPoint& p, const Rational& X, RowFn&& fn) {
    const i128 Xn = X.num, Xd = X.den;
    if (Xn < 2 * Xd) return; // X < 2: empty ball
    const i128 m2 = checked_mul(p.m, p.m);
    const i128 rhs_row = checked_mul(Xn, m2);
    const i128 y02 = checked_mul(p.y0, p.y0);
    const i128 ball_rhs = checked_mul(checked_sub(Xn, 2 * Xd), checked_mul(y02, m2));
    // z^2 scaled by m^2: (x0^2 - y0^2, 2 x0 y0)
    const i128 z2re = checked_sub(checked_mul(p.x0, p.x0), y02);
    const i128 z2im = 2 * checked_mul(p.x0, p.y0);

    for (i128 c = 0;; ++c) {
        i128 T = checked_sub(rhs_row, checked_mul(Xd, checked_mul(checked_mul(c, c), y02)));
        if (T < 0) break;
        i128 s = isqrt(T / Xd);
        i128 dlo = ceil_div(checked_sub(-checked_mul(c, p.x0), s), p.m);
        i128 dhi = floor_div(checked_add(-checked_mul(c, p.x0), s), p.m);
        for (i128 d = dlo; d <= dhi; ++d) {
            if (c == 0) {
                if (d != 1) continue; // normalized rep of the translation coset
            } else if (gcd128(c, d) != 1) {
                continue;
            }
            // One solution of a0*d - b0*c = 1.
            i128 u, v;
            ext_gcd(d, c, u, v); // u*d + v*c = 1
            i128 a0 = u, b0 = -v;
            // P = c z^2 + (d - a0) z m - b0 m^2, Q = (cz + dm) m   (all times m^2 / m)
            i128 Pre = checked_add(checked_mul(c, z2re),
                                   checked_sub(checked_mul(checked_mul(checked_sub(d, a0), p.x0), p.m),
                                               checked_mul(b0, m2)));
            i128 Pim = checked_add(checked_mul(c, z2im),
                                   checked_mul(checked_mul(checked_sub(d, a0), p.y0), p.m));
            i128 Qre = checked_mul(checked_add(checked_mul(c, p.x0), checked_mul(d, p.m)), p.m);
            i128 Qim = checked_mul(checked_mul(c, p.y0), p.m);
            // |P - nQ|^2 * Xd <= (Xn - 2 Xd) y0^2 m^2, quadratic in n.
            i128 A2 = checked_mul(Xd, checked_add(checked_mul(Qre, Qre), checked_mul(Qim, Qim)));
            i128 B1 = checked_mul(2 * Xd, checked_add(checked_mul(Pre, Qre), checked_mul(Pim, Qim)));
            i128 C0 = checked_sub(checked_mul(Xd, checked_add(checked_mul(Pre, Pre), checked_mul(Pim, Pim))),
                                  ball_rhs);
            i128 disc = checked_sub(checked_mul(B1, B1), checked_mul(4 * A2, C0));
            if (disc < 0) continue;
            auto fits = [&](i128 n) {
                return checked_sub(checked_mul(A2, checked_mul(n, n)), checked_mul(B1, n)) + C0 <= 0;
            };
            i128 sq = isqrt(disc);
            i128 nlo = ceil_div(checked_sub(B1, sq + 1), 2 * A2);
            if (!fits(nlo)) ++nlo;
            i128 nhi = floor_div(checked_add(B1, sq + 1), 2 * A2);
            if (!fits(nhi)) --nhi;
            if (nlo > nhi || !fits(nlo) || !fits(nhi)) continue;
            fn(c, d, a0, b0, nlo, nhi, Pre, Pim, Qre, Qim);
        }
    }
}

} // namespace detail

inline constexpr long long kDefaultBallCap = 100000000;

// All PSL2(Z) elements with 4u(gz,z)+2 <= X, sorted by (c,d,a,b) of the
// normalized representative, with exact u values.
inline std::vector<BallEntry> enumerate_ball(const HPoint& z, const Rational& X,
                                             long long cap = kDefaultBallCap) {
    detail::ScaledPoint p(z);
    double predicted = 3.0 * X.to_double();
    if (predicted > static_cast<double>(cap))
        throw resource_cap_error("predicted ball size " + std::to_string(predicted) +
                                 " exceeds cap " + std::to_string(cap));
    std::vector<BallEntry> out;
    const Rational denom = Rational(4) * Rational(checked_mul(p.y0, p.y0)) * Rational(checked_mul(p.m, p.m));
    detail::scan_rows(p, X, [&](i128 c, i128 d, i128 a0, i128 b0, i128 nlo, i128 nhi,
                                i128 Pre, i128 Pim, i128 Qre, i128 Qim) {
        if (static_cast<double>(out.size()) + to_double(nhi - nlo + 1) > static_cast<double>(cap))
            throw resource_cap_error("ball cap exceeded during enumeration");
        for (i128 n = nlo; n <= nhi; ++n) {
            BallEntry e;
            e.element = GroupElement{checked_add(a0, checked_mul(n, c)),
                                     checked_add(b0, checked_mul(n, d)), c, d};
            i128 ur = checked_sub(Pre, checked_mul(n, Qre));
            i128 ui = checked_sub(Pim, checked_mul(n, Qim));
            e.u_value = Rational(checked_add(checked_mul(ur, ur), checked_mul(ui, ui))) / denom;
            i128 tr = e.element.trace();
            e.trace = static_cast<long long>(iabs(tr) > 2 ? iabs(tr) : tr);
            out.push_back(e);
        }
    });
    return out;
}

// Streaming |ball| without materializing entries.
inline long long count_N(const HPoint& z, const Rational& X, long long cap = kDefaultBallCap) {
    detail::ScaledPoint p(z);
    long long total = 0;
    detail::scan_rows(p, X, [&](i128, i128, i128, i128, i128 nlo, i128 nhi,
                                i128, i128, i128, i128) {
        total += static_cast<long long>(nhi - nlo + 1);
        if (total > cap) throw resource_cap_error("ball cap exceeded during count");
    });
    return total;
}

// All SL2 lifts with trace exactly t (> 2) and u(gz,z) <= U.
inline std::vector<GroupElement> enumerate_trace_class(const HPoint& z, long long t,
                                                       const Rational& U,
                                                       long long cap = kDefaultBallCap) {
    if (t <= 2) throw std::domain_error("enumerate_trace_class needs t > 2");
    detail::ScaledPoint p(z);
    Rational X = Rational(4) * U + Rational(2);
    std::vector<GroupElement> out;
    detail::scan_rows(p, X, [&](i128 c, i128 d, i128 a0, i128 b0, i128 nlo, i128 nhi,
                                i128, i128, i128, i128) {
        if (c == 0) return; // translations have trace 2
        // a + d = a0 + n c + d = ±t
        for (i128 target : {i128(t), i128(-t)}) {
            i128 num = checked_sub(target, checked_add(a0, d));
            if (num % c != 0) continue;
            i128 n = num / c;
            if (n < nlo || n > nhi) continue;
            GroupElement g{checked_add(a0, checked_mul(n, c)),
                           checked_add(b0, checked_mul(n, d)), c, d};
            if (g.trace() < 0) g = {-g.a, -g.b, -g.c, -g.d}; // lift with trace +t
            out.push_back(g);
            if (static_cast<long long>(out.size()) > cap)
                throw resource_cap_error("trace class cap exceeded");
        }
    });
    return out;
}

// Streaming count of the trace class (same semantics as enumerate_trace_class).
inline long long count_trace_class(const HPoint& z, long long t, const Rational& U) {
    if (t <= 2) throw std::domain_error("count_trace_class needs t > 2");
    detail::ScaledPoint p(z);
    Rational X = Rational(4) * U + Rational(2);
    long long total = 0;
    detail::scan_rows(p, X, [&](i128 c, i128 d, i128 a0, i128, i128 nlo, i128 nhi,
                                i128, i128, i128, i128) {
        if (c == 0) return;
        for (i128 target : {i128(t), i128(-t)}) {
            i128 num = checked_sub(target, checked_add(a0, d));
            if (num % c == 0) {
                i128 n = num / c;
                if (n >= nlo && n <= nhi) ++total;
            }
        }
    });
    return total;
}

// PSL2 ball members with |trace| <= 2.
inline long long count_nonhyperbolic(const HPoint& z, const Rational& X) {
    detail::ScaledPoint p(z);
    long long total = 0;
    detail::scan_rows(p, X, [&](i128 c, i128 d, i128 a0, i128, i128 nlo, i128 nhi,
                                i128, i128, i128, i128) {
        if (c == 0) {
            total += static_cast<long long>(nhi - nlo + 1); // all translations, trace 2
            return;
        }
        for (i128 target = -2; target <= 2; ++target) {
            i128 num = checked_sub(target, checked_add(a0, d));
            if (num % c == 0) {
                i128 n = num / c;
                if (n >= nlo && n <= nhi) ++total;
            }
        }
    });
    return total;
}

} // namespace hcp
