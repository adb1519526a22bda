#pragma once

// Oscillatory quadrature for zero-order Hankel-type integrals
//
//     I(rho) = int_0^inf J0(rho r) f(r) dr,
//
// with f allowed to be singular at r = 0 and to decay slowly (or even grow
// mildly, in which case the value is the Abel-regularized one). The range is
// split at zeros of J0: a smooth head on [0, j_{0,1}/rho] handled through the
// antiderivative of f, then one block per half-period whose partial sums are
// accelerated with Wynn's epsilon algorithm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "patchflow/error.hpp"

namespace patchflow {

struct HankelQuadratureConfig {
    int head_split = 1;          // number of J0 zeros covered by the smooth head
    int zeros_per_block = 1;
    int max_blocks = 6000;
    int acceleration_depth = 6;  // columns of the epsilon table (uses 2*depth+1 partial sums)
    double abs_tol = 1e-15;
    double rel_tol = 1e-12;

    void validate() const {
        if (head_split < 1 || zeros_per_block < 1) throw ConfigError("Hankel: head_split and zeros_per_block >= 1");
        if (acceleration_depth < 1) throw ConfigError("Hankel: acceleration_depth >= 1");
        if (max_blocks < acceleration_depth + 2) throw ConfigError("Hankel: max_blocks >= acceleration_depth + 2");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("Hankel: tolerances must be positive");
    }
};

struct HankelResult {
    double value = 0.0;
    double error = 0.0;
    int blocks = 0;
};

namespace detail {

/// k-th positive zero of J0 (k >= 1), cached.
inline double bessel_j0_zero(int k) {
    constexpr int kCached = 8192;
    static const std::vector<double> table = [] {
        std::vector<double> t(kCached + 1, 0.0);
        for (int i = 1; i <= kCached; ++i) t[static_cast<std::size_t>(i)] = boost::math::cyl_bessel_j_zero(0.0, i);
        return t;
    }();
    if (k <= kCached) return table[static_cast<std::size_t>(k)];
    return boost::math::cyl_bessel_j_zero(0.0, k);
}

/// 1 - J0(x) without cancellation for small x.
inline double one_minus_j0(double x) {
    if (std::abs(x) < 0.5) {
        // 1 - J0 = -sum_{k>=1} (-q)^k / (k!)^2, q = x^2/4
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k <= 9; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            sum -= term;
        }
        return sum;
    }
    return 1.0 - boost::math::cyl_bessel_j(0, x);
}

/// Wynn epsilon extrapolation of the trailing partial sums.
inline double wynn_epsilon(const double* s, std::size_t n) {
    std::vector<double> prev(n, 0.0);
    std::vector<double> cur(s, s + n);
    double best = cur[n - 1];
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<double> next(n - col);
        for (std::size_t i = 0; i + col < n; ++i) {
            const double d = cur[i + 1] - cur[i];
            if (d == 0.0 || !std::isfinite(d)) return best;
            next[i] = prev[i + 1] + 1.0 / d;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0) best = cur.back();
    }
    return best;
}

template <class F>
double gk_integrate(const F& f, double a, double b, double tol) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 6, tol, &err);
}

}  // namespace detail

/// int_0^inf J0(rho r) f(r) dr. `antiderivative(r)` must return int_0^r f.
template <class F, class FA>
HankelResult hankel_j0(const F& f, const FA& antiderivative, double rho, const HankelQuadratureConfig& cfg = {}) {
    cfg.validate();
    if (!(rho > 0.0)) throw DomainError("Hankel quadrature needs rho > 0");
    const double inv = 1.0 / rho;

    // Head: int_0^{S1} J0(s) f(s/rho) ds / rho = F(S1/rho) - int_0^{S1} (1 - J0(s)) f(s/rho) ds / rho.
    const double s1 = detail::bessel_j0_zero(cfg.head_split);
    double head_corr = 0.0;
    int quiet = 0;
    double hi = s1;
    for (int k = 0; k < 400 && quiet < 2; ++k) {
        const double lo = 0.5 * hi;
        const double part = detail::gk_integrate(
            [&](double s) { return detail::one_minus_j0(s) * f(s * inv); }, lo, hi, 1e-11);
        head_corr += part;
        quiet = std::abs(part) <= 1e-17 * std::abs(head_corr) || part == 0.0 ? quiet + 1 : 0;
        hi = lo;
    }
    const double head = antiderivative(s1 * inv) - head_corr * inv;

    const std::size_t window = 2 * static_cast<std::size_t>(cfg.acceleration_depth) + 1;
    std::vector<double> partial;
    partial.reserve(256);
    partial.push_back(head);
    double last_est = std::numeric_limits<double>::quiet_NaN();
    double last_diff = std::numeric_limits<double>::infinity();
    int agree = 0;
    int zero_index = cfg.head_split;
    double a = s1;
    for (int blk = 1; blk <= cfg.max_blocks; ++blk) {
        zero_index += cfg.zeros_per_block;
        const double b = detail::bessel_j0_zero(zero_index);
        const double part = detail::gk_integrate(
            [&](double s) { return boost::math::cyl_bessel_j(0, s) * f(s * inv); }, a, b, 1e-11);
        a = b;
        partial.push_back(partial.back() + part * inv);
        if (partial.size() < window + 1) continue;
        const double est = detail::wynn_epsilon(partial.data() + (partial.size() - window), window);
        const double diff = std::abs(est - last_est);
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(est));
        agree = (diff <= tol && last_diff <= 10.0 * tol) ? agree + 1 : 0;
        last_diff = diff;
        last_est = est;
        if (agree >= 2) return {est, diff, blk};
    }
    throw QuadratureError("Hankel quadrature did not converge within " + std::to_string(cfg.max_blocks) +
                              " blocks at rho=" + std::to_string(rho),
                          last_diff);
}

}  // namespace patchflow
