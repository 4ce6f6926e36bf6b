#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <hcp/hcp.hpp>

using namespace hcp;

namespace {

GroupElement random_element(std::mt19937_64& rng, int len = 8) {
    GroupElement g = kIdentity;
    for (int i = 0; i < len; ++i) {
        if (rng() & 1) g = compose(g, kS);
        g = compose(g, power(kT, (long long)(rng() % 5) - 2));
    }
    return g;
}

// independent reduced-form enumeration: 0 < B < sqrt(D), B^2 = D (mod 4),
// 4|A||C| = D - B^2 with sqrt(D) - B < 2|A| < sqrt(D) + B, AC < 0
std::vector<BinaryQF> brute_reduced(i128 D) {
    std::vector<BinaryQF> out;
    double rt = std::sqrt(to_double(D));
    for (i128 B = 1; B * B < D; ++B) {
        if ((D - B * B) % 4 != 0) continue;
        i128 M = (D - B * B) / 4; // = |A||C|
        for (i128 a = 1; a * a <= M; ++a) {
            if (M % a != 0) continue;
            for (i128 A : {a, M / a}) {
                double da = 2 * to_double(A);
                if (!(rt - to_double(B) < da && da < rt + to_double(B))) continue;
                out.push_back({A, B, -(M / A)});
                out.push_back({-A, B, M / A});
                if (a == M / a) break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

TEST_CASE("discriminant and act") {
    CHECK(discriminant({1, 1, -1}) == 5);
    CHECK(discriminant({1, 0, 1}) == -4);
    CHECK(act(BinaryQF{1, 0, -1}, kS) == BinaryQF{-1, 0, 1});
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        BinaryQF q{(i128)(rng() % 9) - 4, (i128)(rng() % 9) - 4, (i128)(rng() % 9) - 4};
        GroupElement s = random_element(rng), t = random_element(rng);
        CHECK(act(q, kIdentity) == q);
        CHECK(discriminant(act(q, t)) == discriminant(q));
        // right action law: (Q^s)^t = Q^(st)
        CHECK(act(act(q, s), t) == act(q, compose(s, t)));
    }
}

TEST_CASE("gamma_to_form / form_to_gamma") {
    GroupElement g{2, 1, 1, 1};
    CHECK(gamma_to_form(g) == BinaryQF{1, -1, -1});
    CHECK(discriminant(gamma_to_form(g)) == 5); // 3^2 - 4
    CHECK(form_to_gamma({1, -1, -1}, 3) == g);
    CHECK_THROWS_AS(form_to_gamma({1, 0, -1}, 3), std::domain_error);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        GroupElement tau = random_element(rng, 5);
        GroupElement gam = random_element(rng, 5);
        GroupElement conj = compose(compose(tau.inverse(), gam), tau);
        CHECK(gamma_to_form(conj) == act(gamma_to_form(gam), tau));
    }
    // roundtrip over a trace class; roots of Q_gamma(X,1) are the fixed
    // points of gamma: c x^2 + (d-a) x - b = 0 <=> (ax+b)/(cx+d) = x
    for (auto& gam : enumerate_trace_class(HPoint(), 3, Rational(10)))
        CHECK(form_to_gamma(gamma_to_form(gam), 3) == gam);
}

TEST_CASE("reduction cycles and equivalence") {
    FormCycle c = reduce_cycle({1, 1, -1});
    bool has = false;
    for (auto& q : c.forms)
        if (q == BinaryQF{-1, 1, 1}) has = true;
    CHECK(has);
    CHECK(equivalent({1, 1, -1}, {-1, 1, 1}));
    CHECK_THROWS_AS(reduce_cycle({1, 0, -1}), std::domain_error); // square disc
    CHECK_THROWS_AS(reduce_cycle({1, 0, 1}), std::domain_error);  // negative disc

    std::mt19937_64 rng(13);
    BinaryQF seed{1, 4, -1}; // disc 20
    std::vector<BinaryQF> orbit{seed};
    for (int i = 0; i < 30; ++i)
        orbit.push_back(act(seed, random_element(rng)));
    for (int i = 0; i < 30; ++i) {
        auto& p = orbit[rng() % orbit.size()];
        auto& q = orbit[rng() % orbit.size()];
        CHECK(equivalent(p, q));
        CHECK(reduce_cycle(p).anchor == reduce_cycle(q).anchor);
    }
    // reduce_to_anchor returns the witness transform
    for (int i = 0; i < 30; ++i) {
        auto& p = orbit[rng() % orbit.size()];
        auto [anchor, tau] = reduce_to_anchor(p);
        CHECK(act(p, tau) == anchor);
    }
}

TEST_CASE("class_list against brute-forced reduced forms") {
    for (i128 D : {i128(5), i128(8), i128(12), i128(13), i128(20), i128(21), i128(40), i128(60)}) {
        auto cls = class_list(D);
        auto reduced = brute_reduced(D);
        // anchors are exactly the distinct cycle minima of all reduced forms
        std::set<BinaryQF> anchors;
        for (auto& q : reduced) anchors.insert(reduce_cycle(q).anchor);
        REQUIRE(cls.size() == anchors.size());
        for (auto& q : cls) CHECK(anchors.count(q) == 1);
        // each listed form has disc D and no two are equivalent
        for (size_t a = 0; a < cls.size(); ++a) {
            CHECK(discriminant(cls[a]) == D);
            for (size_t b = a + 1; b < cls.size(); ++b)
                CHECK(!equivalent(cls[a], cls[b]));
        }
    }
    CHECK(class_list(5).size() == 1);
    CHECK_THROWS_AS(class_list(7), std::domain_error);  // 3 mod 4
    CHECK_THROWS_AS(class_list(16), std::domain_error); // square
    CHECK_THROWS_AS(class_list(-4), std::domain_error);
}

TEST_CASE("random forms land on exactly one anchor") {
    std::mt19937_64 rng(14);
    for (i128 D : {i128(12), i128(40)}) {
        auto cls = class_list(D);
        for (auto& seed : cls)
            for (int i = 0; i < 20; ++i) {
                BinaryQF q = act(seed, random_element(rng));
                int hits = 0;
                for (auto& a : cls)
                    if (equivalent(q, a)) ++hits;
                CHECK(hits == 1);
            }
    }
}

TEST_CASE("pell_fundamental") {
    CHECK(pell_fundamental(5) == std::pair<i128, i128>(3, 1));
    CHECK(pell_fundamental(12) == std::pair<i128, i128>(4, 1));
    CHECK(pell_fundamental(8) == std::pair<i128, i128>(6, 2));
    // brute-force minimality for all valid D <= 120
    for (i128 D = 5; D <= 120; ++D) {
        if (D % 4 == 2 || D % 4 == 3 || is_square(D)) continue;
        auto [t, u] = pell_fundamental(D);
        CHECK(t * t - D * u * u == 4);
        CHECK(u >= 1);
        bool minimal = true;
        for (i128 v = 1; v < u && minimal; ++v)
            if (is_square(D * v * v + 4)) minimal = false;
        CHECK(minimal);
    }
}

TEST_CASE("automorph") {
    Automorph a = automorph({1, 1, -1});
    CHECK(a.generator == GroupElement{1, 1, 1, 2});
    CHECK(a.generator.trace() == 3);
    CHECK(a.norm_log == doctest::Approx(2 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-14));
    for (long long n : {2, 3})
        CHECK(act(BinaryQF{1, 1, -1}, power(a.generator, n)) == BinaryQF{1, 1, -1});
    std::mt19937_64 rng(15);
    for (int i = 0; i < 40; ++i) {
        BinaryQF q{2, 2, -2}; // imprimitive, disc 20
        if (i % 2) q = BinaryQF{1, 5, -3}; // disc 37
        BinaryQF qt = act(q, random_element(rng));
        Automorph b = automorph(q), bt = automorph(qt);
        CHECK(act(q, b.generator) == q);
        CHECK(act(qt, bt.generator) == qt);
        CHECK(b.norm_log == doctest::Approx(bt.norm_log).epsilon(1e-12));
    }
    // minimality: no smaller positive power of the generator stabilizes a
    // different Pell solution (generator trace matches the fundamental t)
    for (i128 D : {i128(5), i128(13), i128(21), i128(44)}) {
        auto [t, u] = pell_fundamental(D);
        for (auto& q : class_list(D)) {
            Automorph g = automorph(q);
            i128 cont = iabs(q.content());
            i128 Dp = D / (cont * cont);
            auto [tp, up] = pell_fundamental(Dp);
            CHECK(g.pell_t == tp);
            CHECK(g.pell_u == up);
            CHECK(iabs(g.generator.trace()) == tp);
        }
        (void)t;
        (void)u;
    }
    CHECK_THROWS_AS(automorph({1, 0, 1}), std::domain_error);
    CHECK_THROWS_AS(automorph({1, 2, 0}), std::domain_error); // square disc
}

TEST_CASE("conjugacy classes of trace t match classes of disc t^2-4") {
    // count distinct anchors of Q_gamma over a big trace-class sample
    HPoint z;
    for (long long t = 3; t <= 10; ++t) {
        i128 D = (i128)t * t - 4;
        auto cls = class_list(D);
        std::set<BinaryQF> seen;
        for (auto& g : enumerate_trace_class(z, t, Rational(200)))
            seen.insert(reduce_cycle(gamma_to_form(g)).anchor);
        CHECK(seen.size() == cls.size());
    }
}
