#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <hcp/hcp.hpp>

using namespace hcp;

namespace {

GroupElement random_element(std::mt19937_64& rng, int len = 6) {
    GroupElement g = kIdentity;
    for (int i = 0; i < len; ++i) {
        if (rng() & 1) g = compose(g, kS);
        g = compose(g, power(kT, (long long)(rng() % 5) - 2));
    }
    return g;
}

BinaryQF random_form(std::mt19937_64& rng) {
    return {(i128)(rng() % 11) - 5, (i128)(rng() % 11) - 5, (i128)(rng() % 11) - 5};
}

} // namespace

TEST_CASE("codiscriminant basics and identity (2.21)") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 500; ++i) {
        BinaryQF p = random_form(rng), q = random_form(rng);
        CHECK(codiscriminant(p, p) == discriminant(p));
        CHECK(codiscriminant(p, q) == codiscriminant(q, p));
        GroupElement tau = random_element(rng);
        CHECK(codiscriminant(act(p, tau), act(q, tau)) == codiscriminant(p, q));
        // (A1C2-A2C1)^2 - (A1B2-A2B1)(B1C2-B2C1) = (t^2 - d1 d2)/4
        i128 ac = p.A * q.C - q.A * p.C;
        i128 ab = p.A * q.B - q.A * p.B;
        i128 bc = p.B * q.C - q.B * p.C;
        i128 t = codiscriminant(p, q);
        CHECK(4 * (ac * ac - ab * bc) == t * t - discriminant(p) * discriminant(q));
    }
}

TEST_CASE("canonical_pair is a class invariant") {
    std::mt19937_64 rng(22);
    HPoint z;
    auto c3 = enumerate_trace_class(z, 3, Rational(20));
    auto c4 = enumerate_trace_class(z, 4, Rational(20));
    int done = 0;
    while (done < 200) {
        GroupElement g1 = c3[rng() % c3.size()], g2 = c4[rng() % c4.size()];
        FormPair p(gamma_to_form(g1), gamma_to_form(g2));
        if (p.proportional()) continue;
        FormPair canon = canonical_pair(p);
        CHECK(canonical_pair(canon) == canon); // idempotent
        GroupElement tau = random_element(rng);
        FormPair moved(act(p.q1, tau), act(p.q2, tau));
        CHECK(canonical_pair(moved) == canon);
        // conjugating the matrices is the same class
        GroupElement h1 = compose(compose(tau.inverse(), g1), tau);
        GroupElement h2 = compose(compose(tau.inverse(), g2), tau);
        FormPair conj(gamma_to_form(h1), gamma_to_form(h2));
        CHECK(canonical_pair(conj) == canon);
        ++done;
    }
    // proportional input is rejected
    FormPair prop(BinaryQF{1, 1, -1}, BinaryQF{2, 2, -2});
    CHECK_THROWS_AS(canonical_pair(prop), std::domain_error);
}

TEST_CASE("class_count_h agrees with the box oracle") {
    for (i128 d1 : {i128(5), i128(12)})
        for (i128 d2 : {i128(5), i128(12)}) {
            auto table = box_class_table(d1, d2, 30);
            for (auto& [t, expect] : table)
                CHECK(class_count_h(d1, d2, t) == expect);
        }
    CHECK(class_count_h(6, 5, 3) == 0);  // 6 = 2 mod 4: no forms
    CHECK(class_count_h(5, 14, 3) == 0); // 14 = 2 mod 4
    CHECK_THROWS_AS(class_count_h(5, 5, 5), std::domain_error); // t^2 = d1 d2
}

TEST_CASE("lemma31 bound apparatus") {
    CHECK(square_part_S({4}) == 2);
    CHECK(square_part_S({8, 12}) == 2);
    CHECK(square_part_S({5, 7}) == 1);
    CHECK(square_part_S({4, 8, 16}) == 2);
    CHECK_THROWS_AS(square_part_S({0, 0}), std::domain_error);
    CHECK(divisor_count(12) == 6);
    CHECK(lemma31_bound(5, 8, 3) == 4); // tau(|9-40|)^2 * S(5,8,9) = 2^2 * 1
    CHECK_THROWS_AS(lemma31_bound(5, 5, 5), std::domain_error);
    CHECK_THROWS_AS(lemma31_bound(4, 5, 3), std::domain_error); // square d1
    // ratio h/bound finite over the h(5,12,.) table; log the max
    double worst = 0;
    for (i128 t = -30; t <= 30; ++t) {
        long long h = class_count_h(5, 12, t);
        if (h == 0) continue;
        double r = double(h) / to_double(lemma31_bound(5, 12, t));
        worst = std::max(worst, r);
    }
    MESSAGE("max h/bound over h(5,12,.): ", worst);
    CHECK(worst > 0);
    CHECK(std::isfinite(worst));
}

TEST_CASE("conic points satisfy (3.4) and the conic equation") {
    std::mt19937_64 rng(23);
    int done = 0;
    while (done < 500) {
        BinaryQF q1 = random_form(rng), q2 = random_form(rng);
        i128 a = (i128)(rng() % 9) - 4, b = (i128)(rng() % 9) - 4;
        // (3.4): d2 Q1^2 + d1 Q2^2 - 2t Q1 Q2 = R^2, identically
        i128 Q1 = q1.eval(a, b), Q2 = q2.eval(a, b);
        i128 R = conic_R(q1, q2, a, b);
        i128 t = codiscriminant(q1, q2);
        CHECK(discriminant(q2) * Q1 * Q1 + discriminant(q1) * Q2 * Q2 - 2 * t * Q1 * Q2 ==
              R * R);
        auto pt = conic_point(q1, q2, a, b);
        if (!pt) continue;
        auto [x, y] = *pt;
        Rational lhs = Rational(discriminant(q2)) * x * x + Rational(discriminant(q1)) * y * y -
                       Rational(2 * t) * x * y;
        CHECK(lhs == Rational(1));
        ++done;
    }
    // (a,b) = (1,0) lands at (A1, A2)/(A1B2 - A2B1)
    BinaryQF q1{1, 1, -1}, q2{1, 3, -2};
    auto pt = conic_point(q1, q2, 1, 0);
    REQUIRE(pt.has_value());
    i128 den = q1.A * q2.B - q2.A * q1.B;
    CHECK(pt->first == Rational(q1.A, den));
    CHECK(pt->second == Rational(q2.A, den));
}

TEST_CASE("proportional pairs and E_sum") {
    CHECK(proportional_class_set(3, 4).empty()); // 5*12 not a square
    CHECK(E_sum(3, 4) == 0.0);
    auto r33 = proportional_class_set(3, 3);
    REQUIRE(r33.size() == 2 * class_list(5).size());
    double w = 2 * std::log((3 + std::sqrt(5.0)) / 2);
    for (auto& pp : r33) {
        CHECK(pp.weight == doctest::Approx(w).epsilon(1e-13));
        CHECK(iabs(pp.lambda_num) == 1);
        CHECK(pp.lambda_den == 1);
        // lambda q2 = q1 exactly
        CHECK(pp.pair.q1.A * pp.lambda_den == pp.lambda_num * pp.pair.q2.A);
        CHECK(pp.pair.q1.B * pp.lambda_den == pp.lambda_num * pp.pair.q2.B);
        CHECK(pp.pair.q1.C * pp.lambda_den == pp.lambda_num * pp.pair.q2.C);
    }
    CHECK(E_sum(3, 3) == doctest::Approx(2 * w).epsilon(1e-13));
    // weights invariant under simultaneous action: automorph norm_log of the
    // transformed base form is unchanged (covered in quadform tests); here
    // check the monitored growth ratio E(t1,t2)/t2^1.2
    double worst = 0;
    for (i128 t2 = 3; t2 <= 40; ++t2)
        for (i128 t1 = 3; t1 <= t2; ++t1) {
            double e = E_sum(t1, t2);
            worst = std::max(worst, e / std::pow(to_double(t2), 1.2));
        }
    MESSAGE("max E(t1,t2)/t2^1.2 for t <= 40: ", worst);
    CHECK(std::isfinite(worst));
}

TEST_CASE("non-proportional pairs have codisc^2 != d1 d2") {
    std::mt19937_64 rng(24);
    HPoint z;
    std::vector<std::vector<GroupElement>> cls;
    for (long long t = 3; t <= 6; ++t) cls.push_back(enumerate_trace_class(z, t, Rational(30)));
    for (int i = 0; i < 500; ++i) {
        auto& a = cls[rng() % cls.size()];
        auto& b = cls[rng() % cls.size()];
        FormPair p(gamma_to_form(a[rng() % a.size()]), gamma_to_form(b[rng() % b.size()]));
        if (p.proportional()) continue;
        CHECK(checked_mul(p.codisc, p.codisc) != checked_mul(p.d1, p.d2));
    }
}

TEST_CASE("gcd_decompose") {
    CHECK(gcd_decompose(3, 5) == std::pair<i128, i128>(1, 1));
    {
        auto [e1, e2] = gcd_decompose(4, 6);
        CHECK(e1 * e2 == 4);
        CHECK(gcd128(e1, e2) == 1);
    }
    CHECK_THROWS_AS(gcd_decompose(5, 5), std::domain_error);
    for (i128 t1 = 3; t1 <= 60; ++t1)
        for (i128 t2 = t1 + 1; t2 <= 60; ++t2) {
            i128 E = gcd128(t1 * t1 - 4, t2 * t2 - 4);
            auto [e1, e2] = gcd_decompose(t1, t2);
            CHECK(e1 * e2 == E);
            CHECK(gcd128(e1, e2) == 1);
            CHECK(16 * (t2 - t1) % e1 == 0);
            CHECK(16 * (t1 + t2) % e2 == 0);
            CHECK(E <= (t2 - t1) * (t1 + t2));
        }
}

TEST_CASE("diagnostic sums") {
    // (3.19) over [100, 110) is an exact integer sum of square parts
    DiagnosticReport rep = diagnostic_sums(100, 110, 120);
    double direct = 0;
    for (i128 t = 100; t < 110; ++t) direct += to_double(square_part_S({t * t - 4}));
    CHECK(rep.sum_3_19 == direct);
    // empty window: b = a kills the (3.17) near-diagonal sum
    CHECK(diagnostic_sums(100, 100, 120).sum_3_17 == 0.0);
    // monotone in b
    double prev = 0;
    for (i128 b = 100; b <= 120; b += 5) {
        double cur = diagnostic_sums(100, b, 120).sum_3_19;
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK_THROWS_AS(diagnostic_sums(100, 99, 120), std::domain_error);
    MESSAGE("(3.17) ratio: ", rep.sum_3_17 / rep.rhs_3_17,
            "  (3.18) ratio: ", rep.sum_3_18 / rep.rhs_3_18,
            "  (3.20) ratio: ", rep.sum_3_20 / rep.rhs_3_20,
            "  (3.7) ratio: ", rep.sum_3_7 / rep.rhs_3_7);
}
