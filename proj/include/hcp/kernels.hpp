#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "moebius.hpp"
#include "pairclass.hpp"
#include "quadform.hpp"
#include "quadrature.hpp"

namespace hcp {

struct KernelParams {
    double s0 = 0, t0 = 0, f_ratio = 0; // S0, T0 > 0; F >= 0, F != 1 where required

    KernelParams() = default;
    KernelParams(double S0, double T0, double F) : s0(S0), t0(T0), f_ratio(F) {
        if (!(s0 > 0) || !(t0 > 0)) throw std::domain_error("KernelParams: S0, T0 must be positive");
        if (!(f_ratio >= 0)) throw std::domain_error("KernelParams: F must be nonnegative");
    }
};

struct Thresholds {
    double A, B, C, D;
};

// A,B of the window analysis; C,D are the roots of (1+y^2+2Fy)S0^2 = F^2-1
// and need F > 1.
inline Thresholds thresholds(const KernelParams& p, bool need_cd = false) {
    Thresholds t{};
    double root = std::sqrt((1 + p.s0 * p.s0) * (1 + p.t0 * p.t0));
    t.A = root - p.s0 * p.t0;
    t.B = root + p.s0 * p.t0;
    if (need_cd) {
        if (!(p.f_ratio > 1)) throw std::domain_error("thresholds: C, D need F > 1");
        double w = std::sqrt(p.f_ratio * p.f_ratio - 1) * std::sqrt(1 + p.s0 * p.s0) / p.s0;
        t.C = -p.f_ratio - w;
        t.D = -p.f_ratio + w;
    } else {
        t.C = t.D = std::nan("");
    }
    return t;
}

// artanh(y) - arctan(S0 y)/S0, the primitive of A r^2 / ((1-r^2)(r^2+A-1))
// with A = 1 + 1/S0^2.
inline double bigF(double s0, double y) {
    if (!(y >= 0 && y < 1)) throw std::domain_error("bigF: y must lie in [0,1)");
    return std::atanh(y) - std::atan(s0 * y) / s0;
}

// artanh(s) + arctan(s/S0)/S0, the primitive of A / ((1-r^2)(1+(A-1)r^2)).
inline double bigV(double s0, double s) {
    if (!(s > -1 && s < 1)) throw std::domain_error("bigV: s must lie in (-1,1)");
    return std::atanh(s) + std::atan(s / s0) / s0;
}

// J(S0,T0,F) for F > 1: S0 (F(y1) + eps F(y2)); zero once F reaches B.
inline double j_gt1(const KernelParams& p) {
    if (!(p.f_ratio > 1)) throw std::domain_error("j_gt1 needs F > 1");
    const double S0 = p.s0, T0 = p.t0, F = p.f_ratio;
    Thresholds th = thresholds(p);
    if (F >= th.B) return 0;
    auto yval = [&](double denom) {
        double v = 1 - (1 + S0 * S0) * (F * F - 1) / (denom * denom);
        if (v < -1e-9) throw std::runtime_error("j_gt1: y_i out of range");
        v = std::min(std::max(v, 0.0), 1.0 - 1e-300);
        return std::sqrt(v);
    };
    double y1 = yval(T0 + S0 * F);
    double eps = 0;
    double term2 = 0;
    if (F <= th.A) {
        // the boundary point F = A is folded into the eps = 0 branch
        if (F < th.A) {
            eps = (T0 / S0 > 1) ? 1.0 : -1.0;
            term2 = bigF(S0, yval(T0 - S0 * F));
        }
    }
    return S0 * (bigF(S0, y1) + eps * term2);
}

// J(S0,T0,F) for 0 <= F < 1: S0 (V(s1) - V(s2)) - pi/2, the constant being
// (1/2) * integral of sqrt(1-F^2)/(1+y^2+2Fy) over R.
inline double j_lt1(const KernelParams& p) {
    if (!(p.f_ratio >= 0 && p.f_ratio < 1)) throw std::domain_error("j_lt1 needs 0 <= F < 1");
    const double S0 = p.s0, T0 = p.t0, F = p.f_ratio;
    double q = (1 + S0 * S0) * (1 - F * F);
    double a1 = S0 * F + T0, a2 = S0 * F - T0;
    double s1 = a1 / std::sqrt(a1 * a1 + q);
    double s2 = a2 / std::sqrt(a2 * a2 + q);
    return S0 * (bigV(S0, s1) - bigV(S0, s2)) - M_PI / 2;
}

// Z(S0,T0,F) = 2J(S0,T0,F) + 2J(T0,S0,F), closed form.
inline double z_closed(const KernelParams& p) {
    if (p.f_ratio == 1) throw std::domain_error("z_closed: F = 1 excluded");
    KernelParams swapped(p.t0, p.s0, p.f_ratio);
    if (p.f_ratio > 1) return 2 * j_gt1(p) + 2 * j_gt1(swapped);
    return 2 * j_lt1(p) + 2 * j_lt1(swapped);
}

// Quadrature oracle for Z: the S-integral is done analytically
// (S^2+2FTS+T^2+1-F^2 = (S+FT)^2 + (1-F^2)(1+T^2)), the T-integral
// adaptively; the sqrt boundary is absorbed by the antiderivative.
inline double z_quadrature(const KernelParams& p, double abs_tol = 1e-11, double rel_tol = 1e-9) {
    if (p.f_ratio == 1) throw std::domain_error("z_quadrature: F = 1 excluded");
    const double S0 = p.s0, T0 = p.t0, F = p.f_ratio;
    auto inner = [&](double T) -> double {
        if (F < 1) {
            double w = std::sqrt((1 - F * F) * (1 + T * T));
            return std::asinh((S0 + F * T) / w) - std::asinh((-S0 + F * T) / w);
        }
        double g = std::sqrt((F * F - 1) * (1 + T * T));
        double val = 0;
        // admissible S: |S+FT| >= g intersected with [-S0, S0]
        double lo = std::max(-S0, -F * T + g);
        if (lo < S0) {
            double hi_arg = (S0 + F * T) / g, lo_arg = (lo + F * T) / g;
            val += std::acosh(std::max(hi_arg, 1.0)) - std::acosh(std::max(lo_arg, 1.0));
        }
        double hi = std::min(S0, -F * T - g);
        if (hi > -S0) {
            double a1 = (S0 - F * T) / g, a2 = -(hi + F * T) / g;
            val += std::acosh(std::max(a1, 1.0)) - std::acosh(std::max(a2, 1.0));
        }
        return val;
    };
    if (F < 1) return integrate(inner, -T0, T0, abs_tol, rel_tol, 40);
    // for F > 1 the S-interval degenerates at |S0 -+ FT| = g, giving interior
    // sqrt kinks; split there so each piece is edge-singular only
    std::vector<double> pts = {-T0, T0};
    double disc = (S0 * S0 + 1) * (F * F - 1);
    double r = std::sqrt(disc);
    for (double t : {-S0 * F - r, -S0 * F + r, S0 * F - r, S0 * F + r})
        if (t > -T0 && t < T0) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    double total = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        total += integrate(inner, pts[i - 1], pts[i], abs_tol / double(pts.size()), rel_tol, 40);
    return total;
}

// I(t1,t2,f/sqrt(d1 d2), k_{x1/4}, k_{x2/4}) in closed form.
inline double i_char(long long t1, long long t2, long long f, double x1, double x2) {
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("i_char: traces must exceed 2");
    double d1 = double(t1) * t1 - 4, d2 = double(t2) * t2 - 4;
    if ((double)f * f == d1 * d2) throw std::domain_error("i_char: f^2 = d1 d2 excluded");
    if (!(x1 > d1) || !(x2 > d2)) return 0;
    KernelParams p(std::sqrt(x1 / d1 - 1), std::sqrt(x2 / d2 - 1),
                   std::abs((double)f) / std::sqrt(d1 * d2));
    return z_closed(p);
}

// J(t1,t2,k_{x1/4},k_{x2/4}) = 2 sqrt(1-m)/sqrt(m), m = max(d_i/x_i).
inline double j_char(long long t1, long long t2, double x1, double x2) {
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("j_char: traces must exceed 2");
    double d1 = double(t1) * t1 - 4, d2 = double(t2) * t2 - 4;
    if (!(x1 > d1) || !(x2 > d2)) return 0;
    double m = std::max(d1 / x1, d2 / x2);
    return 2 * std::sqrt(1 - m) / std::sqrt(m);
}

// K(S0,T0,F) of the F<1 rearrangement, by quadrature.
inline double k_fn(const KernelParams& p) {
    if (!(p.f_ratio > 0 && p.f_ratio < 1)) throw std::domain_error("k_fn needs 0 < F < 1");
    const double S0 = p.s0, F = p.f_ratio;
    double c = 1 - F * F;
    auto integrand = [&](double y) {
        double den = 1 + y * y + 2 * F * y;
        // rationalized to avoid cancellation: S0^2 / (sqrt(den S0^2 + c) + sqrt(c))
        return S0 * S0 / (std::sqrt(den * S0 * S0 + c) + std::sqrt(c));
    };
    return integrate(integrand, -p.t0 / S0, p.t0 / S0, 1e-12, 1e-10);
}

// Monte-Carlo estimate of the pair integral over the geodesic-strip box:
// int_H  1{4u(g1 z,z) <= x1} 1{4u(g2 z,z) <= x2} dmu, sampled uniformly in
// (x, log y) over a bounding box derived from the two geodesic supports.
inline std::pair<double, double> lemma23_mc(const GroupElement& g1, const GroupElement& g2,
                                            double x1, double x2, long long n,
                                            unsigned long long seed) {
    BinaryQF q1 = gamma_to_form(g1), q2 = gamma_to_form(g2);
    if (FormPair(q1, q2).proportional())
        throw std::domain_error("lemma23_mc: proportional forms (shared axis)");
    double t1 = to_double(iabs(g1.trace())), t2 = to_double(iabs(g2.trace()));
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("lemma23_mc: hyperbolic pairs only");
    if (x1 <= t1 * t1 - 4 || x2 <= t2 * t2 - 4) return {0.0, 0.0};
    // Support of 1{4u <= x}: |Q(z,1)|^2 <= x y^2, a neighborhood of the
    // geodesic between the roots of Q(.,1).
    struct Strip {
        double r1, r2, amp; // roots and sqrt(x)/|A|
    };
    auto strip = [](const BinaryQF& q, double x) {
        double A = to_double(q.A), B = to_double(q.B), C = to_double(q.C);
        double D = B * B - 4 * A * C;
        double s = std::sqrt(D);
        Strip st;
        st.r1 = (-B - s) / (2 * A);
        st.r2 = (-B + s) / (2 * A);
        if (st.r1 > st.r2) std::swap(st.r1, st.r2);
        st.amp = std::sqrt(x) / std::abs(A);
        return st;
    };
    Strip s1 = strip(q1, x1), s2 = strip(q2, x2);
    // |z - r_near| <= sqrt(amp * y) forces x within sqrt(amp*y) of a root and
    // y^2 <= amp*y i.e. y <= amp.
    double ymax = std::min(s1.amp, s2.amp);
    double xlo = std::min(s1.r1, s2.r1) - std::sqrt(std::max(s1.amp, s2.amp) * ymax);
    double xhi = std::max(s1.r2, s2.r2) + std::sqrt(std::max(s1.amp, s2.amp) * ymax);
    // Minimal y of the intersection: points of both strips are within
    // sqrt(amp_i y) of the respective root sets, so the root-set distance
    // bounds y from below.
    double gap = std::min(std::min(std::abs(s1.r1 - s2.r1), std::abs(s1.r1 - s2.r2)),
                          std::min(std::abs(s1.r2 - s2.r1), std::abs(s1.r2 - s2.r2)));
    double cgap = std::sqrt(s1.amp) + std::sqrt(s2.amp);
    double ylo = 0.5 * (gap / cgap) * (gap / cgap);
    if (!(ylo > 0)) ylo = 1e-9 * ymax;
    if (ylo >= ymax) return {0.0, 0.0};
    double V0 = (xhi - xlo) * (std::log(ymax) - std::log(ylo));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(xlo, xhi), uw(std::log(ylo), std::log(ymax));
    auto inside = [](const BinaryQF& q, double x, double yy, double xx) {
        double A = to_double(q.A), B = to_double(q.B), C = to_double(q.C);
        double re = A * (xx * xx - yy * yy) + B * xx + C;
        double im = (2 * A * xx + B) * yy;
        return re * re + im * im <= x * yy * yy;
    };
    double sum = 0, sumsq = 0;
    for (long long i = 0; i < n; ++i) {
        double xx = ux(rng), yy = std::exp(uw(rng));
        // dmu = dx dy / y^2 = dx dw / y with w = log y
        double val = (inside(q1, x1, yy, xx) && inside(q2, x2, yy, xx)) ? V0 / yy : 0.0;
        sum += val;
        sumsq += val * val;
    }
    double mean = sum / double(n);
    double var = std::max(0.0, sumsq / double(n) - mean * mean);
    return {mean, std::sqrt(var / double(n))};
}

} // namespace hcp
