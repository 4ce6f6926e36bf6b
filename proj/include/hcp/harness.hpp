#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "kernels.hpp"
#include "moebius.hpp"
#include "pairclass.hpp"
#include "quadform.hpp"

namespace hcp {

// Deterministic parallel map: results are assembled by task index, so the
// output is identical for any worker count.
template <class Task>
void parallel_for(long long n, int workers, Task&& task) {
    if (workers <= 1 || n <= 1) {
        for (long long i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    int k = std::min<long long>(workers, n);
    pool.reserve(k);
    for (int w = 0; w < k; ++w)
        pool.emplace_back([&] {
            for (long long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) task(i);
        });
    for (auto& th : pool) th.join();
}

inline int default_workers() {
    unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 4;
}

// |{gamma in Gamma_t : u(z, gamma z) <= x/4}|.
inline long long M_t(const HPoint& z, long long t, const Rational& x) {
    if (t <= 2) throw std::domain_error("M_t: t > 2 required");
    return count_trace_class(z, t, x / Rational(4));
}

// ---- fundamental-domain quadrature ---------------------------------------

struct DomainSpec {
    double height = 10;   // truncation: Im z <= height
    int nx = 64;          // columns over |Re z| <= 1/2 (power of two keeps
                          // node denominators, and so the exact-count
                          // integer sizes, small)
    int ny = 192;         // log-graded rows per column (finer near y = 1)
    int max_refine = 3;   // doublings allowed while chasing rel_tol
    double rel_tol = 0.005;
    int workers = 0;      // 0: hardware concurrency
};

namespace detail {

template <class F>
double fd_pass(F&& f, double H, int nx, int ny, int workers) {
    std::vector<double> col(nx, 0.0);
    parallel_for(nx, workers, [&](long long i) {
        Rational xr(2 * (i128)i + 1 - nx, 2 * (i128)nx);
        double xd = xr.to_double();
        double ylo = std::sqrt(1 - xd * xd);
        if (ylo >= H) return;
        double ratio = std::pow(H / ylo, 1.0 / ny);
        double s = 0;
        double ya = ylo;
        for (int j = 0; j < ny; ++j) {
            double yb = ya * ratio;
            // dyadic in-cell node: denominator 2^k with spacing <= cell/8,
            // so lcm with the x denominator stays a small power of two
            double w = yb - ya;
            i128 den = 1;
            while (to_double(den) * w < 8) den <<= 1;
            Rational yr(static_cast<i128>(std::llround(0.5 * (ya + yb) * to_double(den))), den);
            // cell weight for dmu = dx dy/y^2
            s += (1.0 / ya - 1.0 / yb) * f(HPoint(xr, yr));
            ya = yb;
        }
        col[i] = s / nx;
    });
    double total = 0;
    for (double c : col) total += c; // fixed order: deterministic
    return total;
}

} // namespace detail

// Quadrature of f over the fundamental domain truncated at Im z = height,
// with dmu = dx dy/y^2.  Midpoint-style cells, log-graded in y; sample
// points are small-denominator rationals so f may use exact predicates.
// Refines until two passes agree to rel_tol; returns (value, gap estimate).
template <class F>
std::pair<double, double> fd_integral(F&& f, const DomainSpec& spec) {
    int workers = spec.workers > 0 ? spec.workers : default_workers();
    int nx = spec.nx, ny = spec.ny;
    double prev = detail::fd_pass(f, spec.height, nx, ny, workers);
    double cur = prev, gap = HUGE_VAL;
    for (int lvl = 0; lvl < spec.max_refine; ++lvl) {
        nx *= 2;
        ny *= 2;
        cur = detail::fd_pass(f, spec.height, nx, ny, workers);
        gap = std::abs(cur - prev);
        if (gap <= spec.rel_tol * std::max(std::abs(cur), 1e-12)) return {cur, gap};
        prev = cur;
    }
    return {cur, gap};
}

// ---- the inner-product identity ------------------------------------------

struct IdentityReport {
    long long t1 = 0, t2 = 0;
    double x1 = 0, x2 = 0;
    double lhs = 0, lhs_err = 0;
    double rhs_E_term = 0, rhs_f_sum = 0;
    long long f_window = 0; // |f| < f_window contributes
    double rel_gap = 0;
    bool pass = false;
};

// LHS: quadrature of M_{t1} M_{t2} over the fundamental domain, truncated at
// sqrt(max(x1,x2)) (for t > 2 the lower-left entry is nonzero, so 4u >= y^2
// and the summands vanish higher up).  RHS: class numbers x closed kernels
// plus the proportional-pair term.
inline IdentityReport verify_lemma21(long long t1, long long t2, double x1, double x2,
                                     double tol = 0.02, DomainSpec spec = {}) {
    if (t1 <= 2 || t2 <= 2) throw std::domain_error("verify_lemma21: traces must exceed 2");
    IdentityReport rep;
    rep.t1 = t1;
    rep.t2 = t2;
    rep.x1 = x1;
    rep.x2 = x2;
    double d1 = double(t1) * t1 - 4, d2 = double(t2) * t2 - 4;
    if (x1 <= d1 || x2 <= d2) {
        rep.pass = true; // both sides empty
        return rep;
    }

    // RHS ---------------------------------------------------------------
    rep.rhs_E_term = j_char(t1, t2, x1, x2) * E_sum(t1, t2);
    KernelParams kp(std::sqrt(x1 / d1 - 1), std::sqrt(x2 / d2 - 1), 2.0);
    double Bwin = thresholds(kp).B;
    long long fmax = static_cast<long long>(std::ceil(Bwin * std::sqrt(d1 * d2))) + 1;
    rep.f_window = fmax;
    i128 D1 = (i128)t1 * t1 - 4, D2 = (i128)t2 * t2 - 4;
    std::vector<double> fterm(2 * fmax + 1, 0.0);
    int workers = spec.workers > 0 ? spec.workers : default_workers();
    parallel_for(2 * fmax + 1, workers, [&](long long idx) {
        long long f = idx - fmax;
        if ((i128)f * f == checked_mul(D1, D2)) return;
        double ic = i_char(t1, t2, f, x1, x2);
        if (ic == 0) return;
        long long h = class_count_h(D1, D2, f);
        fterm[idx] = h * ic;
    });
    for (double v : fterm) rep.rhs_f_sum += v;

    // LHS ---------------------------------------------------------------
    Rational xr1((i128)std::llround(x1 * 16), 16), xr2((i128)std::llround(x2 * 16), 16);
    spec.height = std::sqrt(std::max(x1, x2)) * 1.0001;
    auto integrand = [&](const HPoint& z) {
        long long m1 = M_t(z, t1, xr1);
        if (m1 == 0 && t1 != t2) return 0.0;
        long long m2 = (t1 == t2) ? m1 : M_t(z, t2, xr2);
        return double(m1) * double(m2);
    };
    auto [lhs, err] = fd_integral(integrand, spec);
    rep.lhs = lhs;
    rep.lhs_err = err;

    double rhs = rep.rhs_E_term + rep.rhs_f_sum;
    rep.rel_gap = std::abs(rep.lhs - rhs) / std::max(std::abs(rep.lhs), std::abs(rhs));
    rep.pass = rep.rel_gap <= tol;
    return rep;
}

// ---- error scans ----------------------------------------------------------

struct ScanRow {
    HPoint z;
    double X = 0;
    long long N = 0;
    long long nonhyp = 0;
    double err = 0; // N - 3X
};

struct OmegaGrid {
    Rational x_lo{-1, 4}, x_hi{1, 4};
    Rational y_lo{11, 10}, y_hi{2, 1};
    int nx = 16, ny = 16;

    std::vector<std::pair<HPoint, double>> nodes() const {
        std::vector<std::pair<HPoint, double>> out;
        Rational dx = (x_hi - x_lo) / Rational(nx);
        Rational dy = (y_hi - y_lo) / Rational(ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                Rational x = x_lo + dx * Rational(2 * i + 1) / Rational(2);
                Rational y = y_lo + dy * Rational(2 * j + 1) / Rational(2);
                HPoint z(x, y);
                double w = dx.to_double() * dy.to_double() / (y.to_double() * y.to_double());
                out.emplace_back(z, w);
            }
        return out;
    }
};

struct L2Summary {
    double X = 0;
    double l2_err = 0;     // sqrt(sum w (N - 3X)^2)
    double l2_nonhyp = 0;  // sqrt(sum w nonhyp^2)
};

// Exact counts on the grid for each X; per-(z,X) rows plus weighted L2
// aggregates.  Deterministic for any worker count.
inline std::pair<std::vector<ScanRow>, std::vector<L2Summary>>
error_scan(const OmegaGrid& grid, const std::vector<double>& X_values, int workers = 0,
           long long cap = kDefaultBallCap) {
    auto nodes = grid.nodes();
    if (workers <= 0) workers = default_workers();
    std::vector<ScanRow> rows(nodes.size() * X_values.size());
    parallel_for(static_cast<long long>(rows.size()), workers, [&](long long idx) {
        size_t zi = idx / X_values.size(), xi = idx % X_values.size();
        double X = X_values[xi];
        Rational Xr((i128)std::llround(X)); // scan X values are integers
        ScanRow r;
        r.z = nodes[zi].first;
        r.X = X;
        r.N = count_N(r.z, Xr, cap);
        r.nonhyp = count_nonhyperbolic(r.z, Xr);
        r.err = double(r.N) - 3 * X;
        rows[idx] = r;
    });
    std::vector<L2Summary> sums;
    for (size_t xi = 0; xi < X_values.size(); ++xi) {
        L2Summary s;
        s.X = X_values[xi];
        double se = 0, sn = 0;
        for (size_t zi = 0; zi < nodes.size(); ++zi) {
            const ScanRow& r = rows[zi * X_values.size() + xi];
            se += nodes[zi].second * r.err * r.err;
            sn += nodes[zi].second * double(r.nonhyp) * double(r.nonhyp);
        }
        s.l2_err = std::sqrt(se);
        s.l2_nonhyp = std::sqrt(sn);
        sums.push_back(s);
    }
    return {rows, sums};
}

// Least-squares slope of log(stat) against log(X); zero stats dropped.
inline std::pair<double, double> exponent_fit(const std::vector<std::pair<double, double>>& xy) {
    std::vector<std::pair<double, double>> pts;
    for (auto& [X, v] : xy)
        if (v > 0) pts.emplace_back(std::log(X), std::log(v));
    if (pts.size() < 4) throw std::domain_error("exponent_fit: need >= 4 usable points");
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) { mx += x; my += y; }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0, sse = 0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    for (auto& [x, y] : pts) {
        double r = y - (intercept + slope * x);
        sse += r * r;
    }
    double stderr_ = pts.size() > 2 ? std::sqrt(sse / double(pts.size() - 2) / sxx) : 0.0;
    return {slope, stderr_};
}

} // namespace hcp
