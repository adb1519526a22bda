#pragma once

// The radial kernel G(rho) behind u = K * omega, K(x) = rot90(x) G(|x|) / |x|^2,
//
//     G(rho) = m(0+)/(2 pi) + (1/(2 pi)) int_0^inf J0(rho r) m'(r) dr,
//
// its derivatives through the integration-by-parts recursion
//
//     G^(l)(rho) = Gcal_l(rho) + (-1)^l / (2 pi rho^l) int_0^inf J0(rho r) M_l(r) dr,
//     M_l = M_{l-1} + r M_{l-1}',  M_0 = m',
//     Gcal_l = sum_{j<l} a_{j,l} G^(j) / rho^(l-j),
//
// the stream kernel Rt(rho) = int_rho^1 G(r)/r dr, and a tabulated form used
// by the boundary-integral solver.
//
// Sign convention: rot90(x) = (-x2, x1), so a positive Euler patch rotates
// counterclockwise. The two perpendicular conventions (d2, -d1) and (-d2, d1)
// differ from this one by an overall sign of K only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "patchflow/error.hpp"
#include "patchflow/hankel.hpp"
#include "patchflow/multiplier.hpp"
#include "patchflow/vec2.hpp"

namespace patchflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace detail {

/// Coefficients b_{j,l}, j = 1..l+1, of M_l(r) = sum_j b_{j,l} r^{j-1} m^{(j)}(r).
inline std::vector<double> m_coefficients(int l) {
    std::vector<double> b{1.0};  // M_0 = m'
    for (int level = 1; level <= l; ++level) {
        std::vector<double> nb(static_cast<std::size_t>(level) + 1, 0.0);
        for (int j = 1; j <= level + 1; ++j) {
            const double same = j <= level ? b[static_cast<std::size_t>(j) - 1] : 0.0;
            const double lower = j >= 2 ? b[static_cast<std::size_t>(j) - 2] : 0.0;
            nb[static_cast<std::size_t>(j) - 1] = j * same + lower;
        }
        b = std::move(nb);
    }
    return b;
}

/// Coefficients a_{j,l}, j = 1..l-1, of Gcal_l = sum_j a_{j,l} G^(j) / rho^(l-j).
inline std::vector<double> g_coefficients(int l) {
    std::vector<double> a;  // Gcal_1 = 0
    for (int level = 1; level < l; ++level) {
        // Gcal_{level+1} = Gcal_level' - (level/rho)(G^(level) - Gcal_level)
        std::vector<double> na(static_cast<std::size_t>(level), 0.0);
        for (int j = 1; j <= level; ++j) {
            const double shifted = (j >= 2 && j - 2 < static_cast<int>(a.size())) ? a[static_cast<std::size_t>(j) - 2] : 0.0;
            const double same = j - 1 < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(j) - 1] : 0.0;
            na[static_cast<std::size_t>(j) - 1] = shifted + j * same - (j == level ? level : 0);
        }
        a = std::move(na);
    }
    return a;
}

/// M_l(r).
inline double m_l(const MultiplierSymbol& sym, const std::vector<double>& b, double r) {
    const int l = static_cast<int>(b.size()) - 1;
    const auto d = derivatives(sym, r, l + 1);
    double sum = 0.0;
    double rp = 1.0;
    for (int j = 1; j <= l + 1; ++j) {
        sum += b[static_cast<std::size_t>(j) - 1] * rp * d[static_cast<std::size_t>(j)];
        rp *= r;
    }
    return sum;
}

}  // namespace detail

/// int_0^inf J0(rho r) M_l(r) dr.
inline double hankel_moment(const MultiplierSymbol& sym, double rho, int l, const HankelQuadratureConfig& cfg = {}) {
    if (sym.family == Family::Euler) return 0.0;
    if (l < 0 || l + 1 > sym.max_order) throw DomainError("kernel derivative order out of range");
    const auto b = detail::m_coefficients(l);
    auto f = [&](double r) { return r > 0.0 ? detail::m_l(sym, b, r) : 0.0; };
    auto antider = [&](double r) {
        if (l == 0) return sym(r) - sym.m_zero();
        const auto bm = detail::m_coefficients(l - 1);
        return r * detail::m_l(sym, bm, r);
    };
    return hankel_j0(f, antider, rho, cfg).value;
}

/// G(rho) by direct oscillatory quadrature.
inline double g_eval(const MultiplierSymbol& sym, double rho, const HankelQuadratureConfig& cfg = {}) {
    if (!(rho > 0.0)) throw DomainError("G needs rho > 0");
    return (sym.m_zero() + hankel_moment(sym, rho, 0, cfg)) / kTwoPi;
}

/// G^(1..l)(rho) by the derivative recursion; element k-1 holds G^(k).
inline std::vector<double> g_derivs(const MultiplierSymbol& sym, double rho, int l,
                                    const HankelQuadratureConfig& cfg = {}) {
    if (!(rho > 0.0)) throw DomainError("G derivative needs rho > 0");
    if (l < 1 || l > sym.max_order - 1) {
        throw DomainError("G derivative order must lie in [1, " + std::to_string(sym.max_order - 1) + "]");
    }
    std::vector<double> g(static_cast<std::size_t>(l), 0.0);
    double sign = 1.0;
    double rho_pow = 1.0;
    for (int k = 1; k <= l; ++k) {
        sign = -sign;
        rho_pow *= rho;
        const auto a = detail::g_coefficients(k);
        double gcal = 0.0;
        for (int j = 1; j < k; ++j) {
            gcal += a[static_cast<std::size_t>(j) - 1] * g[static_cast<std::size_t>(j) - 1] / std::pow(rho, k - j);
        }
        g[static_cast<std::size_t>(k) - 1] = gcal + sign / (kTwoPi * rho_pow) * hankel_moment(sym, rho, k, cfg);
    }
    return g;
}

inline double g_deriv(const MultiplierSymbol& sym, double rho, int l, const HankelQuadratureConfig& cfg = {}) {
    return g_derivs(sym, rho, l, cfg).back();
}

/// Rt(rho) = int_rho^1 G(r)/r dr by adaptive quadrature of the direct G.
inline double r_tilde_direct(const MultiplierSymbol& sym, double rho, double tol = 1e-10,
                             const HankelQuadratureConfig& cfg = {}) {
    if (!(rho > 0.0)) throw DomainError("Rt needs rho > 0");
    if (rho == 1.0) return 0.0;
    double err = 0.0;
    auto f = [&](double t) { return g_eval(sym, std::exp(t), cfg); };
    const double lo = std::min(std::log(rho), 0.0);
    const double hi = std::max(std::log(rho), 0.0);
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, tol, &err);
    return rho < 1.0 ? v : -v;
}

// ---------------------------------------------------------------------------
// Tabulated kernel

struct KernelTableConfig {
    double rho_min = 1e-8;
    double rho_max = 1e3;
    double tol = 1e-8;
    int start_per_decade = 8;
    int max_per_decade = 512;
    double floor_fraction = 1e-6;  // error floor as a fraction of max |G|
    double bracket_lo = 0.1;  // small-rho bracket for G / m(1/rho)
    double bracket_hi = 1.0;
    HankelQuadratureConfig hankel{};
};

/// G, G', G'', Rt sampled on a uniform grid in t = log(rho) and interpolated by
/// Hermite polynomials built from exact t-derivatives (quintic for G, G', Rt;
/// cubic for G''). Immutable once built.
class KernelTable {
public:
    KernelTable() = default;

    [[nodiscard]] const MultiplierSymbol& symbol() const { return sym_; }
    [[nodiscard]] const KernelTableConfig& config() const { return cfg_; }
    [[nodiscard]] std::size_t size() const { return g_.size(); }
    [[nodiscard]] double rho_at(std::size_t i) const { return std::exp(t0_ + static_cast<double>(i) * h_); }
    [[nodiscard]] double rho_min() const { return std::exp(t0_); }
    [[nodiscard]] double rho_max() const { return std::exp(tmax()); }
    [[nodiscard]] int per_decade() const { return per_decade_; }
    /// Empirical crossover: largest rho up to which G/m(1/rho) stays inside the small-rho bracket.
    [[nodiscard]] double c0() const { return c0_; }
    [[nodiscard]] double max_midpoint_error() const { return mid_err_; }
    /// Absolute floor used when measuring relative interpolation error.
    [[nodiscard]] double error_floor() const { return g_floor_; }

    [[nodiscard]] const std::vector<double>& g_values() const { return g_; }
    [[nodiscard]] const std::vector<double>& g1_values() const { return g1_; }
    [[nodiscard]] const std::vector<double>& g2_values() const { return g2_; }
    [[nodiscard]] const std::vector<double>& rtilde_values() const { return rt_; }

    /// G(rho). Beyond rho_max the integral term is dropped (G -> m(0+)/2pi).
    [[nodiscard]] double g(double rho) const {
        const double t = checked_log(rho);
        if (t > tmax()) return g_inf_;
        return quintic(g_, gd_, gdd_, t);
    }

    [[nodiscard]] double g1(double rho) const {
        const double t = checked_log(rho);
        if (t > tmax()) return 0.0;
        return quintic(g1_, g1d_, g1dd_, t);
    }

    [[nodiscard]] double g2(double rho) const {
        const double t = checked_log(rho);
        if (t > tmax()) return 0.0;
        return cubic(g2_, g2d_, t);
    }

    /// Rt(rho) inside the table range; throws below rho_min.
    [[nodiscard]] double r_tilde(double rho) const {
        if (!(rho > 0.0)) throw DomainError("Rt needs rho > 0");
        return r_tilde_log(checked_log(rho));
    }

    /// Rt as a function of t = log(rho), without range checks. Below the table
    /// G is continued as the local power law rho^-p fitted at rho_min; above,
    /// as the constant m(0+)/2pi.
    [[nodiscard]] double r_tilde_log(double t) const {
        if (t > tmax()) return rt_.back() - g_inf_ * (t - tmax());
        if (t >= t0_) return quintic(rt_, rtd_, rtdd_, t);
        const double p = low_power_;
        const double dt = t0_ - t;
        if (std::abs(p) < 1e-12) return rt_.front() + g_.front() * dt;
        return rt_.front() + g_.front() * std::expm1(p * dt) / p;
    }

    /// G as a function of t = log(rho), continued like r_tilde_log outside the table.
    [[nodiscard]] double g_log(double t) const {
        if (t > tmax()) return g_inf_;
        if (t >= t0_) return quintic(g_, gd_, gdd_, t);
        return g_.front() * std::exp(low_power_ * (t0_ - t));
    }

    /// G' as a function of t = log(rho), continued like g_log outside the table.
    [[nodiscard]] double g1_log(double t) const {
        if (t > tmax()) return 0.0;
        if (t >= t0_) return quintic(g1_, g1d_, g1dd_, t);
        return g1_.front() * std::exp((low_power_ + 1.0) * (t0_ - t));
    }

    /// Local power-law exponent p with G ~ rho^-p below rho_min.
    [[nodiscard]] double low_power() const { return low_power_; }

    /// 64-bit FNV-1a hash over the tabulated values (bitwise).
    [[nodiscard]] std::uint64_t hash() const {
        std::uint64_t hsh = 1469598103934665603ULL;
        auto mix = [&hsh](const std::vector<double>& v) {
            for (double x : v) {
                unsigned char bytes[sizeof(double)];
                std::memcpy(bytes, &x, sizeof(double));
                for (unsigned char c : bytes) {
                    hsh ^= c;
                    hsh *= 1099511628211ULL;
                }
            }
        };
        mix(g_);
        mix(g1_);
        mix(g2_);
        mix(rt_);
        return hsh;
    }

    static KernelTable build(const MultiplierSymbol& sym, const KernelTableConfig& cfg = {});

private:
    MultiplierSymbol sym_;
    KernelTableConfig cfg_;
    double t0_ = 0.0;
    double h_ = 1.0;
    int per_decade_ = 0;
    double g_inf_ = 0.0;
    double c0_ = 0.0;
    double mid_err_ = 0.0;
    double g_floor_ = 0.0;
    double low_power_ = 0.0;
    std::vector<double> g_, g1_, g2_, g3_, rt_;
    // first and second derivatives in t
    std::vector<double> gd_, gdd_, g1d_, g1dd_, g2d_, rtd_, rtdd_;

    [[nodiscard]] double tmax() const { return t0_ + h_ * static_cast<double>(g_.size() - 1); }

    [[nodiscard]] double checked_log(double rho) const {
        const double t = std::log(rho);
        if (t < t0_ - 1e-12) {
            throw DomainError("rho=" + std::to_string(rho) + " below kernel table range [" + std::to_string(rho_min()) +
                              ", " + std::to_string(rho_max()) + "]");
        }
        return std::max(t, t0_);
    }

    [[nodiscard]] std::size_t cell(double t, double& u) const {
        const double x = (t - t0_) / h_;
        auto i = static_cast<std::size_t>(std::max(x, 0.0));
        if (i >= g_.size() - 1) i = g_.size() - 2;
        u = x - static_cast<double>(i);
        return i;
    }

    [[nodiscard]] double quintic(const std::vector<double>& f, const std::vector<double>& d,
                                 const std::vector<double>& dd, double t) const {
        double u = 0.0;
        const std::size_t i = cell(t, u);
        const double u2 = u * u;
        const double u3 = u2 * u;
        const double u4 = u3 * u;
        const double u5 = u4 * u;
        const double a0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
        const double a1 = u - 6 * u3 + 8 * u4 - 3 * u5;
        const double a2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
        const double b0 = 10 * u3 - 15 * u4 + 6 * u5;
        const double b1 = -4 * u3 + 7 * u4 - 3 * u5;
        const double b2 = 0.5 * (u3 - 2 * u4 + u5);
        const double h2 = h_ * h_;
        return a0 * f[i] + a1 * h_ * d[i] + a2 * h2 * dd[i] + b0 * f[i + 1] + b1 * h_ * d[i + 1] + b2 * h2 * dd[i + 1];
    }

    [[nodiscard]] double cubic(const std::vector<double>& f, const std::vector<double>& d, double t) const {
        double u = 0.0;
        const std::size_t i = cell(t, u);
        const double u2 = u * u;
        const double u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * f[i] + (u3 - 2 * u2 + u) * h_ * d[i] + (-2 * u3 + 3 * u2) * f[i + 1] +
               (u3 - u2) * h_ * d[i + 1];
    }

    void finish();
};

namespace detail {

struct KernelSample {
    double g, g1, g2, g3;
};

inline KernelSample kernel_sample(const MultiplierSymbol& sym, double rho, const HankelQuadratureConfig& hc) {
    const double g = g_eval(sym, rho, hc);
    const auto d = g_derivs(sym, rho, 3, hc);
    return {g, d[0], d[1], d[2]};
}

}  // namespace detail

inline KernelTable KernelTable::build(const MultiplierSymbol& sym, const KernelTableConfig& cfg) {
    if (!(cfg.rho_min > 0.0) || !(cfg.rho_max > cfg.rho_min) || cfg.rho_min > 1.0 || cfg.rho_max < 1.0) {
        throw DomainError("kernel table range must satisfy 0 < rho_min <= 1 <= rho_max");
    }
    if (!(cfg.tol > 0.0) || cfg.tol > 1e-4) throw DomainError("kernel table tol must lie in (0, 1e-4]");
    if (cfg.start_per_decade < 1 || cfg.max_per_decade < cfg.start_per_decade) {
        throw DomainError("kernel table grid density out of range");
    }
    KernelTable tab;
    tab.sym_ = sym;
    tab.cfg_ = cfg;
    tab.g_inf_ = sym.m_zero() / kTwoPi;

    int ppd = cfg.start_per_decade;
    // Grid indices are anchored at log(rho) = 0 so that rho = 1 is a node.
    double h = std::log(10.0) / ppd;
    auto kmin = static_cast<long>(std::floor(std::log(cfg.rho_min) / h + 1e-9));
    const auto kmax = static_cast<long>(std::ceil(std::log(cfg.rho_max) / h - 1e-9));
    std::vector<detail::KernelSample> samples;
    for (long k = kmin; k <= kmax; ++k) samples.push_back(detail::kernel_sample(sym, std::exp(k * h), cfg.hankel));

    for (;;) {
        tab.t0_ = kmin * h;
        tab.h_ = h;
        tab.per_decade_ = ppd;
        tab.g_.clear();
        tab.g1_.clear();
        tab.g2_.clear();
        tab.g3_.clear();
        for (const auto& s : samples) {
            tab.g_.push_back(s.g);
            tab.g1_.push_back(s.g1);
            tab.g2_.push_back(s.g2);
            tab.g3_.push_back(s.g3);
        }
        tab.finish();

        // Errors are relative to |G|, floored at a small fraction of the largest
        // tabulated |G| so that the rapidly decaying large-rho tail is judged absolutely.
        double g_floor = 0.0;
        for (const auto& s : samples) g_floor = std::max(g_floor, std::abs(s.g));
        g_floor = g_floor > 0.0 ? g_floor * cfg.floor_fraction : 1e-300;
        tab.g_floor_ = g_floor;

        // Direct values at midpoints; they become the next level's new nodes.
        std::vector<detail::KernelSample> mids;
        double err = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            const double rho = std::exp(tab.t0_ + (static_cast<double>(i) + 0.5) * h);
            const auto direct = detail::kernel_sample(sym, rho, cfg.hankel);
            const double scale = std::max(std::abs(direct.g), g_floor);
            err = std::max(err, std::abs(tab.g(rho) - direct.g) / scale);
            err = std::max(err, std::abs(tab.g1(rho) - direct.g1) / (std::abs(direct.g1) + scale / rho));
            mids.push_back(direct);
        }
        tab.mid_err_ = err;
        if (err < 10.0 * cfg.tol || 2 * ppd > cfg.max_per_decade) break;
        std::vector<detail::KernelSample> merged;
        merged.reserve(samples.size() + mids.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            merged.push_back(samples[i]);
            if (i < mids.size()) merged.push_back(mids[i]);
        }
        samples = std::move(merged);
        ppd *= 2;
        h *= 0.5;
        kmin *= 2;
    }

    // c0: largest node up to which G/m(1/rho) stays inside the bracket.
    tab.c0_ = tab.rho_at(0);
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double rho = tab.rho_at(i);
        const double q = tab.g_[i] / eval(sym, 1.0 / rho);
        if (!(q >= cfg.bracket_lo && q <= cfg.bracket_hi)) break;
        tab.c0_ = rho;
    }
    return tab;
}

inline void KernelTable::finish() {
    const std::size_t n = g_.size();
    gd_.resize(n);
    gdd_.resize(n);
    g1d_.resize(n);
    g1dd_.resize(n);
    g2d_.resize(n);
    rtd_.resize(n);
    rtdd_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = rho_at(i);
        const double r2 = rho * rho;
        gd_[i] = rho * g1_[i];
        gdd_[i] = rho * g1_[i] + r2 * g2_[i];
        g1d_[i] = rho * g2_[i];
        g1dd_[i] = rho * g2_[i] + r2 * g3_[i];
        g2d_[i] = rho * g3_[i];
        rtd_[i] = -g_[i];
        rtdd_[i] = -gd_[i];
    }

    // Rt(rho_i) = int_{t_i}^0 G dt, cell by cell with the rule that is exact
    // for the quintic interpolant of G.
    auto cell_integral = [&](std::size_t i) {
        return h_ * (0.5 * (g_[i] + g_[i + 1]) + h_ * (gd_[i] - gd_[i + 1]) / 10.0 +
                     h_ * h_ * (gdd_[i] + gdd_[i + 1]) / 120.0);
    };
    rt_.assign(n, 0.0);
    const auto i_one = static_cast<std::size_t>(std::lround(-t0_ / h_));
    for (std::size_t i = i_one; i + 1 < n; ++i) rt_[i + 1] = rt_[i] - cell_integral(i);
    for (std::size_t i = i_one; i-- > 0;) rt_[i] = rt_[i + 1] + cell_integral(i);
    low_power_ = g_.front() != 0.0 ? -gd_.front() / g_.front() : 0.0;
}

// ---------------------------------------------------------------------------
// Vector kernel

/// K(x) = rot90(x) G(|x|) / |x|^2.
inline Vec2 k_eval(const KernelTable& tab, Vec2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw DomainError("K evaluated at x = 0");
    const double rho = std::sqrt(r2);
    return rot90(x) * (tab.g(rho) / r2);
}

struct KernelGradient {
    Mat2 sym;   // symmetric, traceless
    Mat2 anti;  // antisymmetric
    [[nodiscard]] Mat2 full() const { return sym + anti; }
};

/// Symmetric and antisymmetric parts of grad K from G and G'.
/// Entry (i, j) is d K_i / d x_j.
inline KernelGradient grad_k_from(double g, double g1, Vec2 x) {
    const double r2 = x.norm2();
    const double rho = std::sqrt(r2);
    // Symmetric part: (2G - rho G') / (2 rho^2) * sigma(x) with sigma the traceless
    // matrix [[2 x1 x2, x2^2 - x1^2], [x2^2 - x1^2, -2 x1 x2]] / rho^2. The sign is
    // opposite to the clockwise-perp form because K uses rot90 = (-x2, x1).
    const double cs = (2.0 * g - rho * g1) / (2.0 * r2);
    const double s11 = 2.0 * x.x * x.y / r2;
    const double s12 = (x.y * x.y - x.x * x.x) / r2;
    KernelGradient out;
    out.sym = Mat2{cs * s11, cs * s12, cs * s12, -cs * s11};
    // Antisymmetric part: (G' / (2 rho)) [[0, -1], [1, 0]].
    const double ca = g1 / (2.0 * rho);
    out.anti = Mat2{0.0, -ca, ca, 0.0};
    return out;
}

inline KernelGradient grad_k(const KernelTable& tab, Vec2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw DomainError("grad K evaluated at x = 0");
    const double rho = std::sqrt(r2);
    return grad_k_from(tab.g(rho), tab.g1(rho), x);
}

}  // namespace patchflow
