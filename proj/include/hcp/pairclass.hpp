#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "quadform.hpp"

namespace hcp {

// t = B1 B2 - 2 A1 C2 - 2 A2 C1; symmetric, SL2-invariant.
inline i128 codiscriminant(const BinaryQF& q1, const BinaryQF& q2) {
    return checked_sub(checked_mul(q1.B, q2.B),
                       2 * checked_add(checked_mul(q1.A, q2.C), checked_mul(q2.A, q1.C)));
}

struct FormPair {
    BinaryQF q1, q2;
    i128 d1 = 0, d2 = 0, codisc = 0;

    FormPair() = default;
    FormPair(const BinaryQF& p, const BinaryQF& q)
        : q1(p), q2(q), d1(p.discriminant()), d2(q.discriminant()),
          codisc(codiscriminant(p, q)) {}

    bool proportional() const {
        return checked_sub(checked_mul(q1.A, q2.B), checked_mul(q2.A, q1.B)) == 0 &&
               checked_sub(checked_mul(q1.A, q2.C), checked_mul(q2.A, q1.C)) == 0 &&
               checked_sub(checked_mul(q1.B, q2.C), checked_mul(q2.B, q1.C)) == 0;
    }
    friend bool operator==(const FormPair& a, const FormPair& b) {
        return a.q1 == b.q1 && a.q2 == b.q2;
    }
};

namespace detail {

using PairKey = std::array<long long, 6>;

inline PairKey pair_key(const FormPair& p) {
    return {(long long)p.q1.A, (long long)p.q1.B, (long long)p.q1.C,
            (long long)p.q2.A, (long long)p.q2.B, (long long)p.q2.C};
}

struct FormScore {
    i128 norm, A, B, C;
    friend auto operator<=>(const FormScore&, const FormScore&) = default;
    friend bool operator==(const FormScore&, const FormScore&) = default;
};

inline FormScore score(const BinaryQF& q) {
    return {checked_add(iabs(q.A), checked_add(iabs(q.B), iabs(q.C))), q.A, q.B, q.C};
}

} // namespace detail

// Canonical representative of the SL2(Z)-class of a non-proportional pair:
// q1 moved to its cycle anchor, then q2 minimized over the residual
// stabilizer (powers of the automorph of q1).  Equality of canonical pairs
// decides equivalence.
inline FormPair canonical_pair(const FormPair& p) {
    if (p.proportional()) throw std::domain_error("canonical_pair: proportional pair");
    auto [anchor, tau] = reduce_to_anchor(p.q1);
    BinaryQF base = act(p.q2, tau);
    GroupElement gen = automorph(anchor).generator;

    BinaryQF best = base;
    detail::FormScore best_score = detail::score(base);
    for (const GroupElement& step : {gen, gen.inverse()}) {
        BinaryQF cur = base;
        GroupElement acc = kIdentity;
        detail::FormScore prev = best_score;
        int rising = 0;
        // The automorph is hyperbolic: coefficient growth is eventually
        // monotone, so three consecutive increases certify we are past
        // the minimum.
        while (rising < 3) {
            acc = compose(acc, step);
            cur = act(base, acc);
            detail::FormScore s = detail::score(cur);
            if (s < best_score) { best_score = s; best = cur; }
            rising = (s.norm > prev.norm) ? rising + 1 : 0;
            prev = s;
        }
    }
    return {anchor, best};
}

// ---- class counts h(d1, d2, t) -------------------------------------------

namespace detail {

// All pairs with q1 a fixed anchor of disc d1 and |A2| <= R, solving the
// disc/codiscriminant constraints in closed form, canonicalized.
inline void collect_pairs(const BinaryQF& q1, i128 d1, i128 d2, i128 t, i128 R,
                          std::set<PairKey>& out) {
    const i128 A1 = q1.A, B1 = q1.B, C1 = q1.C;
    for (i128 A2 = -R; A2 <= R; ++A2) {
        if (A2 == 0) continue; // disc d2 non-square forces A2 != 0 given B2 below
        // A1 B2^2 - 2 A2 B1 B2 + (4 A2^2 C1 + 2 A2 t - A1 d2) = 0
        i128 disc4 = checked_add(checked_sub(checked_mul(checked_mul(A2, A2), d1),
                                             2 * checked_mul(checked_mul(A1, A2), t)),
                                 checked_mul(checked_mul(A1, A1), d2));
        if (disc4 < 0 || !is_square(disc4)) continue;
        i128 s = isqrt(disc4);
        for (i128 num : {checked_add(checked_mul(A2, B1), s), checked_sub(checked_mul(A2, B1), s)}) {
            if (num % A1 != 0) continue;
            i128 B2 = num / A1;
            i128 cnum = checked_sub(checked_sub(checked_mul(B1, B2), 2 * checked_mul(A2, C1)), t);
            if (cnum % (2 * A1) != 0) continue;
            i128 C2 = cnum / (2 * A1);
            BinaryQF q2{A2, B2, C2};
            if (q2.discriminant() != d2 || codiscriminant(q1, q2) != t) continue;
            out.insert(pair_key(canonical_pair(FormPair(q1, q2))));
            if (s == 0) break;
        }
    }
}

} // namespace detail

// h(d1, d2, t): number of SL2(Z)-classes of pairs with disc d1, d2 and
// codiscriminant t.  Anchor-based search with a doubling radius that must
// stabilize; cross-checked elsewhere against the box oracle.
inline long long class_count_h(i128 d1, i128 d2, i128 t) {
    if (checked_mul(t, t) == checked_mul(d1, d2))
        throw std::domain_error("class_count_h: t^2 = d1 d2 excluded");
    auto bad_mod = [](i128 d) { i128 r = ((d % 4) + 4) % 4; return r == 2 || r == 3; };
    if (bad_mod(d1) || bad_mod(d2)) return 0;
    if (d1 <= 0 || is_square(d1) || d2 <= 0 || is_square(d2))
        throw std::domain_error("class_count_h: needs positive non-square discriminants");

    std::vector<BinaryQF> anchors = class_list(d1);
    i128 R = 2 * (isqrt(d2) + iabs(t) / std::max<i128>(1, isqrt(d1)) + 8);
    std::set<detail::PairKey> cur, next;
    for (const BinaryQF& q1 : anchors) detail::collect_pairs(q1, d1, d2, t, R, cur);
    for (int round = 0; round < 12; ++round) {
        next.clear();
        for (const BinaryQF& q1 : anchors) detail::collect_pairs(q1, d1, d2, t, 2 * R, next);
        if (next == cur) return (long long)cur.size();
        cur.swap(next);
        R *= 2;
    }
    throw std::runtime_error("class_count_h: search radius did not stabilize");
}

// Independent oracle: enumerate reduced q1 and a coefficient box of q2,
// canonicalize, count distinct classes per codiscriminant.  Radius grows
// until two consecutive rounds agree on every |t| <= tmax.
inline std::map<long long, long long> box_class_table(i128 d1, i128 d2, i128 tmax) {
    auto bad_mod = [](i128 d) { i128 r = ((d % 4) + 4) % 4; return r == 2 || r == 3; };
    std::map<long long, long long> empty_table;
    for (i128 t = -tmax; t <= tmax; ++t)
        if (checked_mul(t, t) != checked_mul(d1, d2)) empty_table[(long long)t] = 0;
    if (bad_mod(d1) || bad_mod(d2)) return empty_table;

    std::vector<BinaryQF> q1s;
    {
        // every class of disc d1 has a reduced representative, and the
        // canonical pair rep has reduced q1, so reduced q1 suffice
        std::vector<BinaryQF> anchors = class_list(d1);
        for (const BinaryQF& a : anchors)
            for (const BinaryQF& f : reduce_cycle(a).forms) q1s.push_back(f);
    }
    auto build = [&](i128 R) {
        std::map<long long, std::set<detail::PairKey>> classes;
        for (const BinaryQF& q1 : q1s) {
            for (i128 A2 = -R; A2 <= R; ++A2) {
                if (A2 == 0) continue;
                for (i128 B2 = -R; B2 <= R; ++B2) {
                    i128 n = checked_sub(checked_mul(B2, B2), d2);
                    if (n % (4 * A2) != 0) continue;
                    BinaryQF q2{A2, B2, n / (4 * A2)};
                    i128 t = codiscriminant(q1, q2);
                    if (iabs(t) > tmax || checked_mul(t, t) == checked_mul(d1, d2)) continue;
                    classes[(long long)t].insert(detail::pair_key(canonical_pair(FormPair(q1, q2))));
                }
            }
        }
        std::map<long long, long long> counts = empty_table;
        for (auto& [t, st] : classes) counts[t] = (long long)st.size();
        return counts;
    };
    i128 R = isqrt(d2) + tmax / 2 + 10;
    std::map<long long, long long> cur = build(R);
    for (int round = 0; round < 8; ++round) {
        i128 R2 = R + R / 2 + 4;
        std::map<long long, long long> next = build(R2);
        if (next == cur) return cur;
        cur.swap(next);
        R = R2;
    }
    throw std::runtime_error("box_class_table: radius did not stabilize");
}

// ---- arithmetic bound apparatus ------------------------------------------

// Largest k with k^2 dividing gcd of the inputs.
inline i128 square_part_S(const std::vector<i128>& ns) {
    i128 g = 0;
    for (i128 n : ns) g = gcd128(g, n);
    if (g == 0) throw std::domain_error("square_part_S: all-zero input");
    return square_part(g);
}

// tau^2(t^2 - d1 d2) * S(d1, d2, t^2); the absolute constant is omitted.
inline i128 lemma31_bound(i128 d1, i128 d2, i128 t) {
    if (is_square(iabs(d1)) || is_square(iabs(d2)))
        throw std::domain_error("lemma31_bound: square discriminant");
    i128 n = checked_sub(checked_mul(t, t), checked_mul(d1, d2));
    if (n == 0) throw std::domain_error("lemma31_bound: t^2 = d1 d2");
    i128 tau = divisor_count(n);
    return checked_mul(checked_mul(tau, tau), square_part_S({d1, d2, checked_mul(t, t)}));
}

// ---- conic parametrization (rational points on d2 x^2 + d1 y^2 - 2t xy = 1)

// R(a,b) = (A1B2-A2B1) a^2 + 2ab (A1C2-A2C1) + b^2 (B1C2-B2C1)
inline i128 conic_R(const BinaryQF& q1, const BinaryQF& q2, i128 a, i128 b) {
    i128 p = checked_sub(checked_mul(q1.A, q2.B), checked_mul(q2.A, q1.B));
    i128 q = checked_sub(checked_mul(q1.A, q2.C), checked_mul(q2.A, q1.C));
    i128 r = checked_sub(checked_mul(q1.B, q2.C), checked_mul(q2.B, q1.C));
    return checked_add(checked_mul(p, checked_mul(a, a)),
                       checked_add(2 * checked_mul(q, checked_mul(a, b)),
                                   checked_mul(r, checked_mul(b, b))));
}

inline std::optional<std::pair<Rational, Rational>>
conic_point(const BinaryQF& q1, const BinaryQF& q2, i128 a, i128 b) {
    i128 R = conic_R(q1, q2, a, b);
    if (R == 0) return std::nullopt;
    return std::make_pair(Rational(q1.eval(a, b), R), Rational(q2.eval(a, b), R));
}

// ---- proportional pairs ---------------------------------------------------

struct ProportionalPair {
    FormPair pair;
    i128 lambda_num = 0, lambda_den = 1; // q1 = lambda * q2 exactly
    double weight = 0;                   // |log N(gamma_0)| of the common stabilizer
};

// One representative per SL2(Z)-class of proportional pairs attached to
// traces (t1, t2).  Nonempty only when (t1^2-4)/(t2^2-4) is a rational
// square whose denominator divides t2^2-4 integrally.
inline std::vector<ProportionalPair> proportional_class_set(i128 t1, i128 t2) {
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("proportional_class_set: traces must exceed 2");
    i128 d1 = checked_sub(checked_mul(t1, t1), 4);
    i128 d2 = checked_sub(checked_mul(t2, t2), 4);
    std::vector<ProportionalPair> out;
    i128 prod = checked_mul(d1, d2);
    if (!is_square(prod)) return out; // d1/d2 not a rational square
    i128 r = isqrt(prod);
    i128 g = gcd128(d1, r);
    i128 p = d1 / g, q = r / g; // lambda = ±p/q in lowest terms
    if (d2 % checked_mul(q, q) != 0) return out; // q | content(Q2) impossible
    i128 d0 = d2 / checked_mul(q, q);
    for (const BinaryQF& q0 : class_list(d0)) {
        double w = automorph(q0).norm_log;
        for (i128 eps : {i128(1), i128(-1)}) {
            BinaryQF f1{eps * checked_mul(p, q0.A), eps * checked_mul(p, q0.B), eps * checked_mul(p, q0.C)};
            BinaryQF f2{checked_mul(q, q0.A), checked_mul(q, q0.B), checked_mul(q, q0.C)};
            ProportionalPair pp;
            pp.pair = FormPair(f1, f2);
            pp.lambda_num = eps * p;
            pp.lambda_den = q;
            pp.weight = w;
            out.push_back(pp);
        }
    }
    return out;
}

inline double E_sum(i128 t1, i128 t2) {
    double s = 0;
    for (const ProportionalPair& pp : proportional_class_set(t1, t2)) s += pp.weight;
    return s;
}

// E = gcd(t1^2-4, t2^2-4) = e1 e2 with gcd(e1,e2)=1, e1 | 16(t1-t2),
// e2 | 16(t1+t2).
inline std::pair<i128, i128> gcd_decompose(i128 t1, i128 t2) {
    if (t1 == t2) throw std::domain_error("gcd_decompose: t1 = t2");
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("gcd_decompose: traces must exceed 2");
    i128 E = gcd128(checked_sub(checked_mul(t1, t1), 4), checked_sub(checked_mul(t2, t2), 4));
    if (E > checked_mul(iabs(checked_sub(t1, t2)), checked_add(t1, t2)))
        throw std::runtime_error("gcd_decompose: bound E <= |t1-t2|(t1+t2) violated");
    i128 minus = 16 * iabs(checked_sub(t1, t2));
    i128 plus = 16 * checked_add(t1, t2);
    i128 e1 = 1, e2 = 1, rest = E;
    for (i128 pr = 2; pr * pr <= rest; ++pr) {
        if (rest % pr != 0) continue;
        i128 pe = 1;
        while (rest % pr == 0) { rest /= pr; pe = checked_mul(pe, pr); }
        if (minus % pe == 0) e1 = checked_mul(e1, pe);
        else if (plus % pe == 0) e2 = checked_mul(e2, pe);
        else throw std::runtime_error("gcd_decompose: prime power divides neither factor");
    }
    if (rest > 1) {
        if (minus % rest == 0) e1 = checked_mul(e1, rest);
        else if (plus % rest == 0) e2 = checked_mul(e2, rest);
        else throw std::runtime_error("gcd_decompose: prime power divides neither factor");
    }
    return {e1, e2};
}

// ---- diagnostic sums (monitored averages; constants fitted, not verified)

struct DiagnosticReport {
    double sum_3_17 = 0, rhs_3_17 = 0;
    double sum_3_18 = 0, rhs_3_18 = 0;
    double sum_3_19 = 0, rhs_3_19 = 0;
    double sum_3_20 = 0, rhs_3_20 = 0;
    double sum_3_7 = 0, rhs_3_7 = 0;
};

// Evaluates the special S-averages on [a, b) x [a, c) windows and logs the
// ratio targets a^(1/2)(c-a)(b-a)^(1/2) etc.
inline DiagnosticReport diagnostic_sums(i128 a, i128 b, i128 c) {
    if (!(3 <= a && a <= b && b <= c && c <= 2 * a))
        throw std::domain_error("diagnostic_sums: need 3 <= a <= b <= c <= 2a");
    DiagnosticReport rep;
    auto S2 = [](i128 u, i128 v) {
        return to_double(square_part_S({checked_sub(checked_mul(u, u), 4),
                                        checked_sub(checked_mul(v, v), 4)}));
    };
    for (i128 t1 = a; t1 < c; ++t1)
        for (i128 t2 = a; t2 < c; ++t2) {
            if (t1 == t2) continue;
            double s = S2(t1, t2);
            if (iabs(t2 - t1) <= b - a) rep.sum_3_17 += s;
            rep.sum_3_18 += s / std::sqrt(to_double(iabs(t1 - t2)));
        }
    double ad = to_double(a), bd = to_double(b), cd = to_double(c);
    rep.rhs_3_17 = (cd - ad) * std::sqrt(ad) * std::sqrt(std::max(1.0, bd - ad));
    rep.rhs_3_18 = (cd - ad) * std::sqrt(ad);
    for (i128 t = a; t < b; ++t)
        rep.sum_3_19 += to_double(square_part(checked_sub(checked_mul(t, t), 4)));
    rep.rhs_3_19 = ad * std::sqrt(std::max(1.0, bd - ad));
    for (i128 t1 = a; t1 < b; ++t1)
        for (i128 t2 = a; t2 < b; ++t2)
            rep.sum_3_20 += S2(t1, t2);
    rep.rhs_3_20 = ad * std::sqrt(std::max(1.0, bd - ad)) +
                   std::sqrt(ad) * std::pow(std::max(1.0, bd - ad), 1.5);
    // short diagnostic window at t = a with A = a
    {
        i128 t = a, A = a;
        i128 d = checked_sub(checked_mul(t, t), 4);
        for (i128 f = -(d - 1); f <= d - 1; ++f) {
            if (iabs(f) < d - A) continue;
            rep.sum_3_7 += to_double(square_part_S({d, checked_mul(f, f)})) /
                           std::sqrt(to_double(checked_sub(d, iabs(f))));
        }
        rep.rhs_3_7 = std::sqrt(to_double(A));
    }
    return rep;
}

} // namespace hcp
