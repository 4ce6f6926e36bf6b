#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "moebius.hpp"
#include "quadrature.hpp"

namespace hcp {

// ---- the fixed bump profile ----------------------------------------------

// c * exp(-1/(1-(2 tau - 3)^2)) on (1,2), zero outside; unit mass, symmetric
// about 3/2 so its first moment is exactly 3/2.
inline double eta0(double tau) {
    if (tau <= 1 || tau >= 2) return 0;
    double s = 2 * tau - 3;
    static const double norm = [] {
        double raw = integrate([](double t) {
            double u = 2 * t - 3;
            return std::exp(-1.0 / (1 - u * u));
        }, 1.0, 2.0, 1e-15, 1e-14);
        return 1.0 / raw;
    }();
    return norm * std::exp(-1.0 / (1 - s * s));
}

// ---- kernels --------------------------------------------------------------

inline double k_char(double x, double y) {
    if (y < 0) throw std::domain_error("k_char: y must be nonnegative");
    return y <= x ? 1.0 : 0.0;
}

// (1/D) int_D^{2D} eta0(tau/D) k_x(y+tau) dtau: 1 below x-2D, 0 above x-D.
inline double k_smooth(double x, double D, double y) {
    if (!(D > 0)) throw std::domain_error("k_smooth: D must be positive");
    if (y < 0) throw std::domain_error("k_smooth: y must be nonnegative");
    if (y <= x - 2 * D) return 1;
    if (y >= x - D) return 0;
    // remaining mass of eta0 beyond (x-y)/D... k_x(y+tau)=1 iff tau <= x-y
    double cut = (x - y) / D; // in (1,2)
    return integrate([&](double t) { return eta0(t); }, 1.0, cut, 1e-13, 1e-11);
}

// ---- Selberg-type transform ----------------------------------------------

struct KernelSpec {
    double x = 0;       // sharp cutoff k_x, or the x of k_{x,D}
    double D = 0;       // 0 means sharp
    bool smoothed() const { return D > 0; }
};

namespace detail {

// h for the sharp kernel k_x: q(v) = 2 sqrt(max(x-v,0)),
// g(a) = 2 q((cosh a - 1)/2), h(r) = int g(a) e^{ira} da over |a| <= amax.
// The sqrt edge at amax is flattened by the substitution a = amax - s^2.
inline std::complex<double> h_sharp(double x, std::complex<double> r,
                                    double abs_tol, double rel_tol) {
    if (x <= 0) return {0.0, 0.0};
    double amax = std::acosh(1 + 2 * x);
    auto g = [&](double a) {
        double v = (std::cosh(a) - 1) / 2;
        return 4 * std::sqrt(std::max(x - v, 0.0));
    };
    auto wcos = [&](double a) -> std::complex<double> {
        // e^{ira} + e^{-ira} = 2 cos(ra), valid for complex r
        std::complex<double> ira = std::complex<double>(0, 1) * r * a;
        return std::exp(ira) + std::exp(-ira);
    };
    double split = std::max(0.0, amax - std::min(1.0, amax));
    std::complex<double> head =
        integrate_complex([&](double a) { return g(a) * wcos(a); }, 0.0, split, abs_tol, rel_tol);
    double smax = std::sqrt(amax - split);
    std::complex<double> tail = integrate_complex(
        [&](double s) {
            double a = amax - s * s;
            return 2.0 * s * g(a) * wcos(a);
        },
        0.0, smax, abs_tol, rel_tol);
    return head + tail;
}

} // namespace detail

// h_m(r) for m = k_x (D = 0) or the smoothed k_{x,D}; the smoothed transform
// is the eta0-average of sharp transforms at x - D*sigma.
inline std::complex<double> h_transform(const KernelSpec& spec, std::complex<double> r,
                                        double abs_tol = 1e-10, double rel_tol = 1e-9) {
    if (!spec.smoothed()) return detail::h_sharp(spec.x, r, abs_tol, rel_tol);
    return integrate_complex(
        [&](double sigma) {
            return eta0(sigma) * detail::h_sharp(spec.x - spec.D * sigma, r, abs_tol * 10, rel_tol);
        },
        1.0, 2.0, abs_tol, rel_tol);
}

// Exposed for oracle tests: q_m for the sharp kernel.
inline double q_sharp(double x, double v) { return 2 * std::sqrt(std::max(x - v, 0.0)); }

// ---- smoothed count check -------------------------------------------------

struct Lemma52Report {
    double lhs = 0;        // sum over the orbit of k_{x,D}(u)
    double main = 0;       // 12x - 18D
    double residual = 0;   // lhs - main
    double ratio = 0;      // residual / (x/sqrt(D) + sqrt(x) log x)
};

inline Lemma52Report check_lemma52(const HPoint& z, double x, double D,
                                   long long cap = kDefaultBallCap) {
    // the asymptotic statement assumes D < x/10; the computation itself only
    // needs a nonempty plateau, so allow the full x^0.7 scan range
    if (!(D > 1 && D < x / 2)) throw std::domain_error("check_lemma52: need 1 < D < x/2");
    // k_{x,D}(u) vanishes for u >= x - D, so X = 4(x-D)+2 covers the support;
    // rounding X up to an integer only adds points with k = 0.
    Rational X(static_cast<i128>(std::ceil(4 * (x - D) + 2)));
    Lemma52Report rep;
    detail::ScaledPoint p(z);
    const double denom = 4 * to_double(p.y0) * to_double(p.y0) * to_double(p.m) * to_double(p.m);
    long long seen = 0;
    detail::scan_rows(p, X, [&](i128, i128, i128, i128, i128 nlo, i128 nhi,
                                i128 Pre, i128 Pim, i128 Qre, i128 Qim) {
        seen += static_cast<long long>(nhi - nlo + 1);
        if (seen > cap) throw resource_cap_error("check_lemma52: ball cap exceeded");
        for (i128 n = nlo; n <= nhi; ++n) {
            double ur = to_double(checked_sub(Pre, checked_mul(n, Qre)));
            double ui = to_double(checked_sub(Pim, checked_mul(n, Qim)));
            double u = (ur * ur + ui * ui) / denom;
            rep.lhs += k_smooth(x, D, u);
        }
    });
    rep.main = 12 * x - 18 * D;
    rep.residual = rep.lhs - rep.main;
    rep.ratio = rep.residual / (x / std::sqrt(D) + std::sqrt(x) * std::log(x));
    return rep;
}

// ---- differencing ---------------------------------------------------------

inline std::vector<std::vector<long long>> binom_weights(int J) {
    if (J < 1) throw std::domain_error("binom_weights: J >= 1");
    std::vector<long long> binom(J + 1);
    binom[0] = 1;
    for (int j = 1; j <= J; ++j) binom[j] = binom[j - 1] * (J - j + 1) / j;
    std::vector<std::vector<long long>> a(J + 1, std::vector<long long>(J + 1));
    for (int j1 = 0; j1 <= J; ++j1)
        for (int j2 = 0; j2 <= J; ++j2)
            a[j1][j2] = (((j1 + j2) % 2) ? -1 : 1) * binom[j1] * binom[j2];
    return a;
}

// sum_j (-1)^j C(J,j) int_1^2 eta0(tau) N(z, X - j d tau) dtau; the j = 0
// term is exactly N(z, X).  Counts are evaluated at rational arguments with
// denominator 64 (N is a step function; the snapping moves thresholds by
// less than 2^-7, and the j = 0 term is kept exact).
inline double n_dJ(const HPoint& z, double X, double d, int J,
                   long long cap = kDefaultBallCap) {
    if (!(d >= 100) || !(100.0 * J * d <= X))
        throw std::domain_error("n_dJ: need d >= 100 and 100 J d <= X");
    auto snap = [](double v) { return Rational(static_cast<i128>(std::llround(v * 64)), 64); };
    std::vector<long long> binom(J + 1);
    binom[0] = 1;
    for (int j = 1; j <= J; ++j) binom[j] = binom[j - 1] * (J - j + 1) / j;
    double total = static_cast<double>(count_N(z, snap(X), cap));
    for (int j = 1; j <= J; ++j) {
        double term = gauss64(
            [&](double tau) {
                return eta0(tau) * static_cast<double>(count_N(z, snap(X - j * d * tau), cap));
            },
            1.0, 2.0);
        total += ((j % 2) ? -1.0 : 1.0) * binom[j] * term;
    }
    return total;
}

} // namespace hcp
