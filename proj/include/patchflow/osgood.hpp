#pragma once

// Osgood profiles and moduli.
//
//   nu(rho)  = rho log(1/rho) m(1/rho)   (rho <= 1/2),   rho log 2 m(2) otherwise
//   nut(rho) = rho (m(1/rho) + 1)
//   H(r)     = int_2^r dx / (x log x m(x))          (r >= 2),  log(r/2) / (log 2 m(2)) below
//   Ht(r)    = int_1^r dx / (x (m(x) + 1))
//   M(r)     = r (m(e^r) + 1)                       (r >= r0), r (m(e^r0) + 1) below
//   Hs(r)    = int_r0^r dx / M(x)
//
// Each integral is computed in a logarithmic variable where the integrand is
// tame (u = log log r for H, s = log r for Ht, log r for Hs), using the stable
// m~ forms so the profiles extend far past the range of doubles in r.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "patchflow/error.hpp"
#include "patchflow/multiplier.hpp"

namespace patchflow {

inline double nu_eval(const MultiplierSymbol& sym, double rho) {
    if (!(rho > 0.0)) throw DomainError("nu needs rho > 0");
    if (rho <= 0.5) return rho * std::log(1.0 / rho) * eval(sym, 1.0 / rho);
    return rho * std::log(2.0) * eval(sym, 2.0);
}

inline double nu_tilde_eval(const MultiplierSymbol& sym, double rho) {
    if (!(rho > 0.0)) throw DomainError("nu~ needs rho > 0");
    return rho * (eval(sym, 1.0 / rho) + 1.0);
}

namespace detail {

/// F(v) = int_{v0}^v f(w) dw for a positive integrand f, tabulated at nodes
/// and refined by adaptive quadrature inside a cell. Beyond the last node the
/// integrand is continued as a power law c v^-p; below the first node as a
/// constant.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;

    CumulativeIntegral(std::function<double(double)> f, double v0, double v_lo, double v_hi)
        : f_(std::move(f)) {
        nodes_ = make_nodes(v_lo, v_hi, v0);
        cum_.assign(nodes_.size(), 0.0);
        const auto i0 = static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), v0) - nodes_.begin());
        for (std::size_t i = i0; i + 1 < nodes_.size(); ++i) cum_[i + 1] = cum_[i] + integrate(nodes_[i], nodes_[i + 1]);
        for (std::size_t i = i0; i-- > 0;) cum_[i] = cum_[i + 1] - integrate(nodes_[i], nodes_[i + 1]);

        const double vh = nodes_.back();
        f_hi_ = f_(vh);
        f_lo_ = f_(nodes_.front());
        if (f_hi_ <= 0.0 || !std::isfinite(f_hi_)) {
            p_ = std::numeric_limits<double>::infinity();
            limit_ = cum_.back();
        } else {
            const double v1 = 0.9 * vh;
            p_ = -std::log(f_(v1) / f_hi_) / std::log(v1 / vh);
            limit_ = p_ > 1.0 + 1e-3 ? cum_.back() + f_hi_ * vh / (p_ - 1.0) : std::numeric_limits<double>::infinity();
        }
    }

    [[nodiscard]] double lo() const { return nodes_.front(); }
    [[nodiscard]] double hi() const { return nodes_.back(); }
    /// sup of F (finite when the integrand tail is integrable).
    [[nodiscard]] double limit() const { return limit_; }
    [[nodiscard]] double integrand(double v) const { return f_(v); }

    [[nodiscard]] double operator()(double v) const {
        if (v >= nodes_.back()) return tail(v);
        if (v <= nodes_.front()) return cum_.front() - f_lo_ * (nodes_.front() - v);
        const std::size_t i = cell_of(v);
        return cum_[i] + integrate(nodes_[i], v);
    }

    /// Solves F(v) = y. Returns +inf when y lies at or beyond a finite limit
    /// only if `allow_inf` is set; otherwise throws RangeError.
    [[nodiscard]] double inverse(double y) const {
        if (y <= cum_.front()) return nodes_.front() - (cum_.front() - y) / f_lo_;
        if (y >= cum_.back()) {
            if (y >= limit_) throw RangeError("inverse argument beyond the finite limit " + std::to_string(limit_), limit_);
            return tail_inverse(y);
        }
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
        double a = nodes_[i];
        double b = nodes_[i + 1];
        double v = a + (b - a) * (y - cum_[i]) / std::max(cum_[i + 1] - cum_[i], 1e-300);
        for (int it_n = 0; it_n < 100; ++it_n) {
            const double g = cum_[i] + integrate(nodes_[i], v) - y;
            if (g > 0.0) {
                b = v;
            } else {
                a = v;
            }
            const double fv = f_(v);
            double next = fv > 0.0 ? v - g / fv : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            const double step = std::abs(next - v);
            v = next;
            if (step <= 1e-15 * (1.0 + std::abs(v)) || b - a <= 1e-15 * (1.0 + std::abs(v))) break;
        }
        return v;
    }

private:
    std::function<double(double)> f_;
    std::vector<double> nodes_;
    std::vector<double> cum_;
    double f_hi_ = 0.0;
    double f_lo_ = 0.0;
    double p_ = 0.0;
    double limit_ = std::numeric_limits<double>::infinity();

    static std::vector<double> make_nodes(double lo, double hi, double v0) {
        // Spacing 1/8 near the origin, growing geometrically (factor 1.1) farther out.
        std::vector<double> v{v0};
        auto next_up = [](double x) { return x < 8.0 ? x + 0.125 : x * 1.1; };
        auto next_down = [](double x) { return x > -8.0 ? x - 0.125 : x * 1.1; };
        for (double x = next_up(v0); x < hi; x = next_up(x)) v.push_back(x);
        v.push_back(hi);
        std::vector<double> below;
        for (double x = next_down(v0); x > lo; x = next_down(x)) below.push_back(x);
        if (lo < v0) below.push_back(lo);
        std::reverse(below.begin(), below.end());
        below.insert(below.end(), v.begin(), v.end());
        return below;
    }

    [[nodiscard]] std::size_t cell_of(double v) const {
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
        return std::min(static_cast<std::size_t>(it - nodes_.begin()) - 1, nodes_.size() - 2);
    }

    [[nodiscard]] double integrate(double a, double b) const {
        if (a == b) return 0.0;
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f_, a, b, 10, 1e-14, &err);
    }

    [[nodiscard]] double tail(double v) const {
        const double vh = nodes_.back();
        if (v == vh || f_hi_ <= 0.0) return cum_.back();
        if (std::abs(p_ - 1.0) < 1e-12) return cum_.back() + f_hi_ * vh * std::log(v / vh);
        return cum_.back() + f_hi_ * vh / (p_ - 1.0) * (1.0 - std::pow(vh / v, p_ - 1.0));
    }

    [[nodiscard]] double tail_inverse(double y) const {
        const double vh = nodes_.back();
        const double d = y - cum_.back();
        if (f_hi_ <= 0.0) return vh;
        if (std::abs(p_ - 1.0) < 1e-12) return vh * std::exp(d / (f_hi_ * vh));
        const double q = 1.0 - d * (p_ - 1.0) / (f_hi_ * vh);
        return vh * std::pow(q, -1.0 / (p_ - 1.0));
    }
};

inline double exp_or_inf(double x) { return x > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(x); }

}  // namespace detail

struct EnvelopeBounds {
    double lower = 0.0;
    double upper = 0.0;
    /// Time after which the lower envelope is no longer defined (+inf when it never ends).
    double horizon = std::numeric_limits<double>::infinity();
    bool past_horizon = false;
};

/// Tabulated H, Ht, Hs with inverses. Immutable after construction.
class OsgoodProfile {
public:
    static constexpr double kLogMax = 690.0;  // outer end of the log-variable grids

    OsgoodProfile() = default;

    /// r0 <= 0 selects the default convexity threshold.
    explicit OsgoodProfile(const MultiplierSymbol& sym, double r0 = 0.0) : sym_(sym) {
        r0_ = r0 > 0.0 ? r0 : default_r0(sym);
        if (r0_ < 2.0) throw DomainError("r0 must be >= 2");
        m2_ = eval(sym, 2.0);
        const MultiplierSymbol s = sym;
        h_ = detail::CumulativeIntegral([s](double u) { return 1.0 / s.tilde(std::exp(u)); }, std::log(std::log(2.0)),
                                        std::log(std::log(2.0)), kLogMax);
        ht_ = detail::CumulativeIntegral([s](double v) { return 1.0 / (s.tilde(v) + 1.0); }, 0.0, -kLogMax, kLogMax);
        m_r0_ = sym.tilde(r0_) + 1.0;
        hs_ = detail::CumulativeIntegral([s](double w) { return 1.0 / (s.tilde(std::exp(w)) + 1.0); }, std::log(r0_),
                                         std::log(r0_), kLogMax);
    }

    [[nodiscard]] const MultiplierSymbol& symbol() const { return sym_; }
    [[nodiscard]] double r0() const { return r0_; }

    /// Smallest candidate r0 >= 2 on a geometric grid for which r m~(r) passes a
    /// discrete convexity test on [r0, 10 r0].
    static double default_r0(const MultiplierSymbol& sym) {
        for (double r0 = 2.0; r0 < 1e4; r0 *= 1.25) {
            const int n = 64;
            const double h = 9.0 * r0 / n;
            bool ok = true;
            auto phi = [&](double r) { return r * sym.tilde(r); };
            for (int i = 1; i < n && ok; ++i) {
                const double r = r0 + i * h;
                const double f0 = phi(r - h);
                const double f1 = phi(r);
                const double f2 = phi(r + h);
                const double scale = std::abs(f0) + std::abs(f1) + std::abs(f2);
                if (f0 - 2 * f1 + f2 < -1e-12 * scale) ok = false;
            }
            if (ok) return r0;
        }
        throw DomainError("no convexity threshold r0 found below 1e4");
    }

    // H --------------------------------------------------------------------

    [[nodiscard]] double h_eval(double r) const {
        if (!(r > 0.0)) throw DomainError("H needs r > 0");
        if (r < 2.0) return std::log(r / 2.0) / (std::log(2.0) * m2_);
        return h_(std::log(std::log(r)));
    }

    /// H as a function of u = log log r (r >= 2).
    [[nodiscard]] double h_eval_loglog(double u) const {
        if (u < h_.lo()) throw DomainError("H(u) needs u >= log log 2");
        return h_(u);
    }

    /// sup H; finite exactly when the Osgood integral converges.
    [[nodiscard]] double h_limit() const { return h_.limit(); }

    [[nodiscard]] double h_inv(double y) const {
        if (y < 0.0) return 2.0 * std::exp(y * std::log(2.0) * m2_);
        const double u = h_.inverse(y);
        return detail::exp_or_inf(detail::exp_or_inf(u));
    }

    /// log log of H^{-1}(y) for y >= 0, usable where H^{-1} itself overflows.
    [[nodiscard]] double h_inv_loglog(double y) const {
        if (y < 0.0) throw DomainError("h_inv_loglog needs y >= 0");
        return h_.inverse(y);
    }

    // Ht -------------------------------------------------------------------

    [[nodiscard]] double ht_eval(double r) const {
        if (!(r > 0.0)) throw DomainError("H~ needs r > 0");
        return ht_(std::log(r));
    }
    [[nodiscard]] double ht_limit() const { return ht_.limit(); }
    [[nodiscard]] double ht_inv(double y) const { return detail::exp_or_inf(ht_.inverse(y)); }

    // M, Hs ----------------------------------------------------------------

    [[nodiscard]] double script_m(double r) const {
        if (!(r > 0.0)) throw DomainError("M needs r > 0");
        if (r <= r0_) return r * m_r0_;
        return r * (sym_.tilde(r) + 1.0);
    }

    [[nodiscard]] double script_h(double r) const {
        if (!(r > 0.0)) throw DomainError("Hs needs r > 0");
        if (r <= r0_) return std::log(r / r0_) / m_r0_;
        return hs_(std::log(r));
    }
    [[nodiscard]] double script_h_limit() const { return hs_.limit(); }

    [[nodiscard]] double script_h_inv(double y) const {
        if (y <= 0.0) return r0_ * std::exp(y * m_r0_);
        return detail::exp_or_inf(hs_.inverse(y));
    }

    // Envelopes -------------------------------------------------------------

    /// Two-sided flow-map envelope 1/H^{-1}(H(1/sep0) +- C t).
    [[nodiscard]] EnvelopeBounds envelope_flow_bound(double sep0, double t, double c) const {
        if (!(sep0 > 0.0) || t < 0.0 || !(c > 0.0)) throw DomainError("envelope needs sep0 > 0, t >= 0, C > 0");
        return envelope_from(1.0 / sep0, t, c);
    }

    /// Patch separation lower bound 1/H^{-1}(H(2/d0) + C t).
    [[nodiscard]] EnvelopeBounds envelope_separation(double d0, double t, double c) const {
        if (!(d0 > 0.0) || t < 0.0 || !(c > 0.0)) throw DomainError("envelope needs d0 > 0, t >= 0, C > 0");
        return envelope_from(2.0 / d0, t, c);
    }

private:
    MultiplierSymbol sym_;
    double r0_ = 2.0;
    double m2_ = 1.0;
    double m_r0_ = 1.0;
    detail::CumulativeIntegral h_, ht_, hs_;

    [[nodiscard]] EnvelopeBounds envelope_from(double r_start, double t, double c) const {
        EnvelopeBounds out;
        const double y0 = h_eval(r_start);
        const double lim = h_.limit();
        if (std::isfinite(lim)) out.horizon = (lim - y0) / c;
        const double up = y0 + c * t;
        if (up >= lim) {
            out.past_horizon = true;
            out.lower = 0.0;
        } else {
            out.lower = 1.0 / h_inv(up);
        }
        out.upper = 1.0 / h_inv(y0 - c * t);
        return out;
    }
};

}  // namespace patchflow
