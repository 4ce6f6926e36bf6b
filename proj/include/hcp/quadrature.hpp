#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace hcp {

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
inline constexpr double kr_x[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144838258730, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
inline constexpr double kr_w[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
inline constexpr double gs_w[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

template <class T, class F>
void gk15(F&& f, double a, double b, T& kronrod, double& err) {
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    T kg{}, gg{};
    for (int i = 0; i < 15; ++i) {
        T v = f(c + h * kr_x[i]);
        kg += kr_w[i] * v;
        if (i % 2 == 1) gg += gs_w[i / 2] * v;
    }
    kronrod = h * kg;
    err = std::abs(h * (kg - gg));
}

template <class T, class F>
T adaptive_rec(F&& f, double a, double b, double abs_tol, double rel_tol, int depth,
               double whole_scale) {
    T k;
    double err;
    gk15<T>(f, a, b, k, err);
    if (err <= abs_tol || err <= rel_tol * whole_scale || depth <= 0) return k;
    double m = 0.5 * (a + b);
    return adaptive_rec<T>(f, a, m, abs_tol / 2, rel_tol, depth - 1, whole_scale) +
           adaptive_rec<T>(f, m, b, abs_tol / 2, rel_tol, depth - 1, whole_scale);
}

} // namespace detail

// Adaptive Gauss-Kronrod 7/15.  Splits until the local Kronrod-Gauss gap
// meets the absolute target (budgeted across halves) or a relative target
// against the first whole-interval estimate.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    double k, err;
    detail::gk15<double>(f, a, b, k, err);
    double scale = std::max(std::abs(k), 1e-300);
    return detail::adaptive_rec<double>(f, a, b, abs_tol, rel_tol, max_depth, scale);
}

template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b, double abs_tol = 1e-12,
                                       double rel_tol = 1e-10, int max_depth = 48) {
    if (a == b) return {0.0, 0.0};
    std::complex<double> k;
    double err;
    detail::gk15<std::complex<double>>(f, a, b, k, err);
    double scale = std::max(std::abs(k), 1e-300);
    return detail::adaptive_rec<std::complex<double>>(f, a, b, abs_tol, rel_tol, max_depth, scale);
}

// Fixed 64-point Gauss-Legendre on [a, b] (for smooth weight integrals where
// adaptivity is unnecessary and node determinism matters).
template <class F>
double gauss64(F&& f, double a, double b) {
    static const int n = 64;
    static double x[n], w[n];
    static bool init = false;
    if (!init) {
        // Newton iteration on Legendre polynomials.
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = w[n - 1 - i] = 2 / ((1 - t * t) * dp * dp);
        }
        init = true;
    }
    double h = 0.5 * (b - a), c = 0.5 * (a + b), s = 0;
    for (int i = 0; i < n; ++i) s += w[i] * f(c + h * x[i]);
    return h * s;
}

} // namespace hcp
