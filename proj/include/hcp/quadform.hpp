#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "checked_int.hpp"
#include "moebius.hpp"

namespace hcp {

struct BinaryQF {
    i128 A = 0, B = 0, C = 0; // A X^2 + B XY + C Y^2

    i128 discriminant() const {
        return checked_sub(checked_mul(B, B), 4 * checked_mul(A, C));
    }
    i128 eval(i128 x, i128 y) const {
        return checked_add(checked_mul(A, checked_mul(x, x)),
                           checked_add(checked_mul(B, checked_mul(x, y)),
                                       checked_mul(C, checked_mul(y, y))));
    }
    i128 content() const { return gcd128(gcd128(A, B), C); }

    friend bool operator==(const BinaryQF&, const BinaryQF&) = default;
    friend auto operator<=>(const BinaryQF& p, const BinaryQF& q) {
        return std::tie(p.A, p.B, p.C) <=> std::tie(q.A, q.B, q.C);
    }
};

inline i128 discriminant(const BinaryQF& q) { return q.discriminant(); }

// Q^tau(X,Y) = Q(aX+bY, cX+dY).
inline BinaryQF act(const BinaryQF& q, const GroupElement& t) {
    BinaryQF r;
    r.A = q.eval(t.a, t.c);
    r.C = q.eval(t.b, t.d);
    r.B = checked_add(2 * checked_add(checked_mul(q.A, checked_mul(t.a, t.b)),
                                      checked_mul(q.C, checked_mul(t.c, t.d))),
                      checked_mul(q.B, checked_add(checked_mul(t.a, t.d), checked_mul(t.b, t.c))));
    return r;
}

// Q_gamma = (c, d-a, -b); disc = trace^2 - 4.
inline BinaryQF gamma_to_form(const GroupElement& g) {
    return {g.c, checked_sub(g.d, g.a), -g.b};
}

// Inverse of gamma_to_form on trace-t matrices.
inline GroupElement form_to_gamma(const BinaryQF& q, i128 t) {
    if (t <= 2) throw std::domain_error("form_to_gamma needs t > 2");
    if (q.discriminant() != checked_sub(checked_mul(t, t), 4))
        throw std::domain_error("form_to_gamma: discriminant must be t^2-4");
    if ((iabs(checked_sub(t, q.B)) % 2) != 0)
        throw std::domain_error("form_to_gamma: parity mismatch");
    GroupElement g{checked_sub(t, q.B) / 2, -q.C, q.A, checked_add(t, q.B) / 2};
    if (g.det() != 1) throw std::domain_error("form_to_gamma: determinant mismatch");
    return g;
}

namespace detail {

inline void require_indefinite(i128 D) {
    if (D <= 0 || is_square(D))
        throw std::domain_error("operation needs a positive non-square discriminant");
}

inline bool is_reduced(const BinaryQF& q, i128 D) {
    // |sqrt(D) - 2|A|| < B < sqrt(D), decided exactly.
    if (q.B <= 0) return false;
    if (checked_mul(q.B, q.B) >= D) return false;
    i128 twoA = 2 * iabs(q.A);
    i128 s = checked_add(twoA, q.B);
    if (checked_mul(s, s) <= D) return false; // need sqrt(D) < 2|A| + B
    if (twoA > q.B) {
        i128 r = checked_sub(twoA, q.B);
        if (checked_mul(r, r) >= D) return false; // need 2|A| - B < sqrt(D)
    }
    return true;
}

// One reduction step Q -> Q^tau with tau = (0,-1;1,s); returns (next, tau).
inline std::pair<BinaryQF, GroupElement> rho_step(const BinaryQF& q, i128 D) {
    i128 absC = iabs(q.C);
    if (absC == 0) throw std::domain_error("rho step on degenerate form");
    i128 twoC = 2 * absC;
    i128 Bp;
    i128 sD = isqrt(D);
    if (checked_mul(q.C, q.C) > D) {
        // B' ≡ -B (mod 2|C|) in (-|C|, |C|]
        Bp = ((-q.B) % twoC + twoC) % twoC;
        if (Bp > absC) Bp -= twoC;
    } else {
        // B' ≡ -B (mod 2|C|), the largest value < sqrt(D)
        Bp = checked_sub(sD, ((sD + q.B) % twoC + twoC) % twoC);
    }
    i128 Cp = checked_sub(checked_mul(Bp, Bp), D) / (4 * q.C);
    i128 s = checked_add(q.B, Bp) / (2 * q.C);
    return {{q.C, Bp, Cp}, GroupElement{0, -1, 1, s}};
}

} // namespace detail

struct FormCycle {
    std::vector<BinaryQF> forms; // one full reduction cycle, in rho order
    BinaryQF anchor;             // lexicographic minimum of the cycle
};

// Reduce q and return (anchor, tau) with act(q, tau) = anchor.
inline std::pair<BinaryQF, GroupElement> reduce_to_anchor(const BinaryQF& q0) {
    i128 D = q0.discriminant();
    detail::require_indefinite(D);
    BinaryQF q = q0;
    GroupElement tau = kIdentity;
    int guard = 0;
    while (!detail::is_reduced(q, D)) {
        auto [next, step] = detail::rho_step(q, D);
        q = next;
        tau = compose(tau, step);
        if (++guard > 100000) throw std::runtime_error("reduction did not terminate");
    }
    // Walk the cycle to its lexicographic minimum.
    BinaryQF best = q;
    GroupElement best_tau = tau;
    BinaryQF cur = q;
    GroupElement cur_tau = tau;
    do {
        auto [next, step] = detail::rho_step(cur, D);
        cur = next;
        cur_tau = compose(cur_tau, step);
        if (cur < best) { best = cur; best_tau = cur_tau; }
        if (++guard > 200000) throw std::runtime_error("cycle walk did not terminate");
    } while (!(cur == q));
    return {best, best_tau};
}

inline FormCycle reduce_cycle(const BinaryQF& q0) {
    i128 D = q0.discriminant();
    detail::require_indefinite(D);
    auto [anchor, tau] = reduce_to_anchor(q0);
    FormCycle cycle;
    cycle.anchor = anchor;
    BinaryQF cur = anchor;
    int guard = 0;
    do {
        cycle.forms.push_back(cur);
        cur = detail::rho_step(cur, D).first;
        if (++guard > 200000) throw std::runtime_error("cycle walk did not terminate");
    } while (!(cur == anchor));
    return cycle;
}

inline bool equivalent(const BinaryQF& p, const BinaryQF& q) {
    if (p.discriminant() != q.discriminant()) return false;
    return reduce_to_anchor(p).first == reduce_to_anchor(q).first;
}

// One anchor per SL2(Z) class of discriminant D (all forms, not only primitive).
inline std::vector<BinaryQF> class_list(i128 D) {
    detail::require_indefinite(D);
    i128 r = iabs(D) % 4;
    if (r == 2 || r == 3) throw std::domain_error("discriminant must be 0 or 1 mod 4");
    // Enumerate every reduced form: 0 < B < sqrt(D), AC = (B^2 - D)/4 < 0,
    // window inequalities; then group into cycles.
    i128 sD = isqrt(D);
    std::vector<BinaryQF> reduced;
    for (i128 B = 1; B <= sD; ++B) {
        i128 M4 = checked_sub(D, checked_mul(B, B)); // = -4AC > 0
        if (M4 % 4 != 0) continue;
        i128 M = M4 / 4; // |A||C|
        for (i128 a = 1; checked_mul(a, a) <= M; ++a) {
            if (M % a != 0) continue;
            for (i128 mag : {a, M / a}) {
                for (int s : {1, -1}) {
                    BinaryQF q{s * mag, B, -s * (M / mag)};
                    if (detail::is_reduced(q, D)) reduced.push_back(q);
                }
                if (M / a == a) break;
            }
        }
    }
    std::sort(reduced.begin(), reduced.end());
    reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
    std::vector<BinaryQF> anchors;
    std::vector<bool> used(reduced.size(), false);
    for (size_t i = 0; i < reduced.size(); ++i) {
        if (used[i]) continue;
        // mark the whole cycle of reduced[i]
        BinaryQF anchor = reduced[i];
        BinaryQF cur = reduced[i];
        int guard = 0;
        do {
            auto it = std::lower_bound(reduced.begin(), reduced.end(), cur);
            if (it != reduced.end() && *it == cur) used[size_t(it - reduced.begin())] = true;
            if (cur < anchor) anchor = cur;
            cur = detail::rho_step(cur, D).first;
            if (++guard > 200000) throw std::runtime_error("cycle walk did not terminate");
        } while (!(cur == reduced[i]));
        anchors.push_back(anchor);
    }
    std::sort(anchors.begin(), anchors.end());
    return anchors;
}

// Minimal (t, u), u >= 1, with t^2 - D u^2 = 4.
inline std::pair<i128, i128> pell_fundamental(i128 D) {
    detail::require_indefinite(D);
    // Brute force first (covers every discriminant reachable from traces,
    // where u divides a small content), then continued fractions of sqrt(D).
    for (i128 u = 1; u <= 1000000; ++u) {
        i128 t2 = checked_add(checked_mul(checked_mul(D, u), u), 4);
        if (is_square(t2)) return {isqrt(t2), u};
    }
    // Continued-fraction expansion of sqrt(D).  Every solution of
    // p^2 - D q^2 = v with |v| <= 4 < sqrt(D) appears among the convergents,
    // so the first convergent with v in {4,-4,1,-1} yields the minimal unit;
    // norm -4 / ±1 units are squared or doubled into the t^2 - D u^2 = 4 family.
    auto finish = [&](i128 p, i128 q, i128 v) -> std::pair<i128, i128> {
        if (v == 4) return {p, q};
        if (v == -4) return {checked_add(checked_mul(p, p), 2), checked_mul(p, q)};
        if (v == 1) return {checked_mul(2, p), checked_mul(2, q)};
        // v == -1: square the unit to norm 1, then double.
        i128 X = checked_add(checked_mul(p, p), checked_mul(checked_mul(D, q), q));
        return {checked_mul(2, X), checked_mul(4, checked_mul(p, q))};
    };
    i128 a0 = isqrt(D);
    i128 m = 0, d = 1, a = a0;
    i128 p0 = 1, q0 = 0, p1 = a0, q1 = 1;
    i128 v1 = checked_sub(checked_mul(p1, p1), D);
    if (v1 == -1 || v1 == -4) return finish(p1, q1, v1);
    for (int it = 0; it < 100000; ++it) {
        m = checked_sub(checked_mul(d, a), m);
        d = checked_sub(D, checked_mul(m, m)) / d;
        a = checked_add(a0, m) / d;
        i128 p = checked_add(checked_mul(a, p1), p0);
        i128 q = checked_add(checked_mul(a, q1), q0);
        p0 = p1; q0 = q1; p1 = p; q1 = q;
        i128 val = checked_sub(checked_mul(p1, p1), checked_mul(checked_mul(D, q1), q1));
        if (val == 4 || val == -4 || val == 1 || val == -1) return finish(p1, q1, val);
    }
    throw std::runtime_error("pell_fundamental: continued fraction search exhausted");
}

struct Automorph {
    GroupElement generator; // tau0 of the primitive part; stabilizes the form
    i128 pell_t = 0, pell_u = 0;
    double norm_log = 0; // 2 log((t + u sqrt(Dprim))/2) > 0
};

// Stabilizer generator of an indefinite form (routed through its primitive part).
inline Automorph automorph(const BinaryQF& q) {
    i128 D = q.discriminant();
    detail::require_indefinite(D);
    i128 g = q.content();
    BinaryQF qp{q.A / g, q.B / g, q.C / g};
    i128 Dp = qp.discriminant();
    auto [t, u] = pell_fundamental(Dp);
    if ((iabs(checked_sub(t, checked_mul(qp.B, u))) % 2) != 0)
        throw std::runtime_error("automorph parity failure");
    Automorph out;
    out.pell_t = t;
    out.pell_u = u;
    out.generator = GroupElement{checked_sub(t, checked_mul(qp.B, u)) / 2,
                                 -checked_mul(qp.C, u),
                                 checked_mul(qp.A, u),
                                 checked_add(t, checked_mul(qp.B, u)) / 2};
    if (out.generator.det() != 1) throw std::runtime_error("automorph determinant failure");
    if (!(act(q, out.generator) == q)) throw std::runtime_error("automorph does not stabilize");
    out.norm_log = 2.0 * std::log((to_double(t) + to_double(u) * std::sqrt(to_double(Dp))) / 2.0);
    return out;
}

} // namespace hcp
