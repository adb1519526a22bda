#pragma once

// Radial Fourier multiplier symbols m(r), their exact derivatives, and
// numerical checks of the structural hypotheses on m (positivity, monotonicity,
// Mikhlin-type derivative bounds, growth class at infinity, Osgood condition).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "patchflow/error.hpp"
#include "patchflow/expression.hpp"
#include "patchflow/jet.hpp"

namespace patchflow {

enum class Family { Euler, AlphaSQG, LogLogEuler, LogEuler, TripleLog, QGShallowWater, EulerLambda, Custom };

/// Highest derivative order the jet machinery is instantiated for.
inline constexpr int kMaxJetOrder = 12;

struct MultiplierSymbol {
    Family family = Family::Euler;
    double alpha = 0.0;   // AlphaSQG: m = r^alpha
    double beta = 1.0;    // LogLogEuler: m = log^beta(1 + log(1 + r^2))
    double beta1 = 1.0;   // LogEuler: m = log^beta1(1 + r)
    double lambda = 1.0;  // QGShallowWater / EulerLambda
    int max_order = 6;
    Expression expr;  // Custom only

    static MultiplierSymbol euler() { return {}; }
    static MultiplierSymbol alpha_sqg(double a) {
        MultiplierSymbol s;
        s.family = Family::AlphaSQG;
        s.alpha = a;
        return s.validated();
    }
    static MultiplierSymbol loglog_euler(double b) {
        MultiplierSymbol s;
        s.family = Family::LogLogEuler;
        s.beta = b;
        return s.validated();
    }
    static MultiplierSymbol log_euler(double b1) {
        MultiplierSymbol s;
        s.family = Family::LogEuler;
        s.beta1 = b1;
        return s.validated();
    }
    static MultiplierSymbol triple_log() {
        MultiplierSymbol s;
        s.family = Family::TripleLog;
        return s;
    }
    static MultiplierSymbol qg_shallow_water(double lam) {
        MultiplierSymbol s;
        s.family = Family::QGShallowWater;
        s.lambda = lam;
        return s.validated();
    }
    static MultiplierSymbol euler_lambda(double lam) {
        MultiplierSymbol s;
        s.family = Family::EulerLambda;
        s.lambda = lam;
        return s.validated();
    }
    static MultiplierSymbol custom(const std::string& text) {
        MultiplierSymbol s;
        s.family = Family::Custom;
        s.expr = Expression::parse(text);
        return s.validated();
    }

    /// Throws ConfigError on non-finite or out-of-range parameters.
    MultiplierSymbol validated() const {
        auto bad = [](const std::string& what) { throw ConfigError("invalid multiplier: " + what); };
        for (double v : {alpha, beta, beta1, lambda}) {
            if (!std::isfinite(v)) bad("non-finite parameter");
        }
        if (max_order < 5 || max_order > kMaxJetOrder - 1) {
            bad("max_order must lie in [5, " + std::to_string(kMaxJetOrder - 1) + "]");
        }
        switch (family) {
            case Family::AlphaSQG:
                if (!(alpha > 0.0 && alpha < 2.0)) bad("alpha must lie in (0, 2)");
                break;
            case Family::LogLogEuler:
                if (!(beta > 0.0)) bad("beta must be positive");
                break;
            case Family::LogEuler:
                if (!(beta1 > 0.0)) bad("beta1 must be positive");
                break;
            case Family::QGShallowWater:
            case Family::EulerLambda:
                if (!(lambda > 0.0)) bad("lambda must be positive");
                break;
            case Family::Custom:
                if (expr.empty()) bad("custom family needs an expression");
                break;
            default: break;
        }
        return *this;
    }

    /// Monotone-increasing families; EulerLambda is the documented exception.
    [[nodiscard]] bool monotone() const { return family != Family::EulerLambda; }

    /// m(0+), the analytic limit at the origin.
    [[nodiscard]] double m_zero() const {
        switch (family) {
            case Family::Euler:
            case Family::EulerLambda: return 1.0;
            case Family::Custom: {
                const double v = expr(0.0);
                return std::isfinite(v) ? v : expr(1e-300);
            }
            default: return 0.0;
        }
    }

    /// m(r) for scalars or jets.
    template <class T>
    T operator()(const T& r) const {
        using std::log;
        using std::log1p;
        switch (family) {
            case Family::Euler: return T(1.0);
            case Family::AlphaSQG: return rpow(r, alpha);
            case Family::LogLogEuler: {
                const T l = primal(r) <= 1.0 ? T(log1p(r * r)) : T(2.0 * log(r) + log1p(1.0 / (r * r)));
                return rpow(log1p(l), beta);
            }
            case Family::LogEuler: return rpow(log1p(r), beta1);
            case Family::TripleLog: return log1p(log1p(log1p(r)));
            case Family::QGShallowWater: {
                if (primal(r) <= lambda) return (r * r) / (r * r + lambda * lambda);
                const T q = lambda / r;
                return 1.0 / (1.0 + q * q);
            }
            case Family::EulerLambda: {
                if (primal(r) * lambda <= 1.0) return 1.0 / (1.0 + lambda * lambda * (r * r));
                const T q = 1.0 / (lambda * r);
                return (q * q) / (1.0 + q * q);
            }
            case Family::Custom: return expr(r);
        }
        return T(0.0);
    }

    /// m~(s) = m(e^s), evaluated without forming e^s where that would overflow.
    template <class T>
    T tilde(const T& s) const {
        using std::exp;
        using std::log1p;
        switch (family) {
            case Family::Euler: return T(1.0);
            case Family::AlphaSQG: return exp(alpha * s);
            case Family::LogLogEuler: return rpow(log1p(softplus(2.0 * s)), beta);
            case Family::LogEuler: return rpow(softplus(s), beta1);
            case Family::TripleLog: return log1p(log1p(softplus(s)));
            case Family::QGShallowWater: {
                const double l2 = lambda * lambda;
                if (primal(s) >= std::log(lambda)) return 1.0 / (1.0 + l2 * exp(-2.0 * s));
                const T e = exp(2.0 * s);
                return e / (e + l2);
            }
            case Family::EulerLambda: {
                const double l2 = lambda * lambda;
                if (primal(s) <= -std::log(lambda)) return 1.0 / (1.0 + l2 * exp(2.0 * s));
                const T e = exp(-2.0 * s);
                return e / (e + l2);
            }
            case Family::Custom: return expr(exp(s));
        }
        return T(0.0);
    }
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Euler: return "euler";
        case Family::AlphaSQG: return "alpha_sqg";
        case Family::LogLogEuler: return "loglog_euler";
        case Family::LogEuler: return "log_euler";
        case Family::TripleLog: return "triple_log";
        case Family::QGShallowWater: return "qg_shallow_water";
        case Family::EulerLambda: return "euler_lambda";
        case Family::Custom: return "custom";
    }
    return "?";
}

namespace detail {

template <int N, class F>
std::vector<double> jet_derivatives(const F& f, double x, int kmax) {
    const auto j = f(Jet<N>::variable(x));
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = j.derivative(k);
    return out;
}

/// Derivatives 0..kmax of a generic callable at x, choosing the smallest jet size.
template <class F>
std::vector<double> derivatives_of(const F& f, double x, int kmax) {
    switch (kmax) {
        case 0: return {f(x)};
        case 1: return jet_derivatives<1>(f, x, kmax);
        case 2: return jet_derivatives<2>(f, x, kmax);
        case 3: return jet_derivatives<3>(f, x, kmax);
        case 4: return jet_derivatives<4>(f, x, kmax);
        case 5: return jet_derivatives<5>(f, x, kmax);
        case 6: return jet_derivatives<6>(f, x, kmax);
        case 7: return jet_derivatives<7>(f, x, kmax);
        case 8: return jet_derivatives<8>(f, x, kmax);
        case 9: return jet_derivatives<9>(f, x, kmax);
        case 10: return jet_derivatives<10>(f, x, kmax);
        case 11: return jet_derivatives<11>(f, x, kmax);
        case 12: return jet_derivatives<12>(f, x, kmax);
        default: throw DomainError("derivative order " + std::to_string(kmax) + " not supported");
    }
}

}  // namespace detail

/// m^{(0..kmax)}(r), all exact up to rounding.
inline std::vector<double> derivatives(const MultiplierSymbol& sym, double r, int kmax) {
    if (kmax < 0 || kmax > sym.max_order) {
        throw DomainError("derivative order " + std::to_string(kmax) + " outside [0, " +
                          std::to_string(sym.max_order) + "]");
    }
    if (!(r > 0.0)) throw DomainError("multiplier derivatives need r > 0");
    return detail::derivatives_of([&sym](const auto& x) { return sym(x); }, r, kmax);
}

/// m^{(k)}(r). r = 0 is accepted for k = 0 and returns m(0+).
inline double eval(const MultiplierSymbol& sym, double r, int k = 0) {
    if (k < 0 || k > sym.max_order) {
        throw DomainError("derivative order " + std::to_string(k) + " outside [0, " +
                          std::to_string(sym.max_order) + "]");
    }
    if (r == 0.0 && k == 0) return sym.m_zero();
    if (!(r > 0.0)) throw DomainError("multiplier evaluated at r <= 0");
    if (k == 0) return sym(r);
    return derivatives(sym, r, k)[static_cast<std::size_t>(k)];
}

/// m~^{(0..kmax)}(s) with m~(s) = m(e^s).
inline std::vector<double> tilde_derivatives(const MultiplierSymbol& sym, double s, int kmax) {
    return detail::derivatives_of([&sym](const auto& x) { return sym.tilde(x); }, s, kmax);
}

// ---------------------------------------------------------------------------
// JSON descriptor: { "family": "loglog_euler", "beta": 1.0 }

inline MultiplierSymbol symbol_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("multiplier descriptor must be an object");
    if (!j.contains("family")) throw ConfigError("multiplier descriptor needs a \"family\" field");
    const auto fam = j.at("family").get<std::string>();
    auto num = [&j](const char* key, double def) {
        if (!j.contains(key)) return def;
        if (!j.at(key).is_number()) throw ConfigError(std::string("multiplier field ") + key + " must be a number");
        return j.at(key).get<double>();
    };
    MultiplierSymbol s;
    if (fam == "euler") {
        s.family = Family::Euler;
    } else if (fam == "alpha_sqg") {
        s.family = Family::AlphaSQG;
        s.alpha = num("alpha", 1.0);
    } else if (fam == "loglog_euler") {
        s.family = Family::LogLogEuler;
        s.beta = num("beta", 1.0);
    } else if (fam == "log_euler") {
        s.family = Family::LogEuler;
        s.beta1 = num("beta1", 1.0);
    } else if (fam == "triple_log") {
        s.family = Family::TripleLog;
    } else if (fam == "qg_shallow_water") {
        s.family = Family::QGShallowWater;
        s.lambda = num("lambda", 1.0);
    } else if (fam == "euler_lambda") {
        s.family = Family::EulerLambda;
        s.lambda = num("lambda", 1.0);
    } else if (fam == "custom") {
        s.family = Family::Custom;
        if (!j.contains("expression")) throw ConfigError("custom multiplier needs an \"expression\"");
        s.expr = Expression::parse(j.at("expression").get<std::string>());
    } else {
        throw ConfigError("unknown multiplier family '" + fam + "'");
    }
    if (j.contains("max_order")) s.max_order = j.at("max_order").get<int>();
    return s.validated();
}

inline nlohmann::json symbol_to_json(const MultiplierSymbol& s) {
    nlohmann::json j;
    j["family"] = family_name(s.family);
    switch (s.family) {
        case Family::AlphaSQG: j["alpha"] = s.alpha; break;
        case Family::LogLogEuler: j["beta"] = s.beta; break;
        case Family::LogEuler: j["beta1"] = s.beta1; break;
        case Family::QGShallowWater:
        case Family::EulerLambda: j["lambda"] = s.lambda; break;
        case Family::Custom: j["expression"] = s.expr.text(); break;
        default: break;
    }
    j["max_order"] = s.max_order;
    return j;
}

// ---------------------------------------------------------------------------
// Hypothesis checks

enum class H2Class { H2a, H2b, H2c, Unclassified };
enum class Osgood { Holds, Fails, Undetermined };

inline const char* to_string(H2Class c) {
    switch (c) {
        case H2Class::H2a: return "H2a";
        case H2Class::H2b: return "H2b";
        case H2Class::H2c: return "H2c";
        case H2Class::Unclassified: return "Unclassified";
    }
    return "?";
}

inline const char* to_string(Osgood o) {
    switch (o) {
        case Osgood::Holds: return "Holds";
        case Osgood::Fails: return "Fails";
        case Osgood::Undetermined: return "Undetermined";
    }
    return "?";
}

/// Geometric grid of large frequencies used to estimate the limits at infinity.
struct ProbeGrid {
    double r_lo = 1e4;
    double r_hi = 1e300;
    int points = 60;
};

/// Log-spaced grid for the Mikhlin check.
struct MikhlinGrid {
    double r_lo = 1e-4;
    double r_hi = 1e8;
    int per_decade = 20;
};

struct MikhlinReport {
    std::vector<double> sup;  // index k-1: sup r^k |d^k m'/dr^k| / m'(r)
    bool skipped = false;     // non-monotone family
    bool vacuous = false;     // m' vanishes on the grid
    bool monotone_derivative = true;  // m' eventually monotone (no oscillation)
    bool pass = false;
    std::string note;
};

struct HypothesisReport {
    bool h1_positive = false;
    bool h1_monotone = false;
    std::vector<double> h1_mikhlin_sup;
    H2Class h2_class = H2Class::Unclassified;
    double beta_hat = std::numeric_limits<double>::quiet_NaN();
    double beta1_hat = std::numeric_limits<double>::quiet_NaN();
    double beta2_hat = std::numeric_limits<double>::quiet_NaN();
    double alpha_hat = std::numeric_limits<double>::quiet_NaN();
    Osgood osgood = Osgood::Undetermined;
};

/// Half-width of the undecided band around beta = 1.
inline constexpr double kOsgoodBand = 0.05;

namespace detail {

struct Extrapolated {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

// Least-squares quadratic in x, returning the intercept at x = 0.
inline double quad_intercept(const std::vector<double>& x, const std::vector<double>& y, std::size_t from) {
    double s[5] = {0, 0, 0, 0, 0};
    double t[3] = {0, 0, 0};
    for (std::size_t i = from; i < x.size(); ++i) {
        double p = 1.0;
        for (double& v : s) {
            v += p;
            p *= x[i];
        }
        t[0] += y[i];
        t[1] += y[i] * x[i];
        t[2] += y[i] * x[i] * x[i];
    }
    // Solve the 3x3 normal equations by Cramer's rule.
    const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det3(a);
    double b[3][3] = {{t[0], s[1], s[2]}, {t[1], s[2], s[3]}, {t[2], s[3], s[4]}};
    return det3(b) / d;
}

// Richardson-style extrapolation of a sequence sampled at s_k = log r_k,
// assuming an error expansion in powers of x = 1/log(s). Slowly varying
// symbols converge like 1/log log r, where Aitken's transform does not help.
inline Extrapolated extrapolate(const std::vector<double>& s, const std::vector<double>& y) {
    Extrapolated out;
    const std::size_t n = y.size();
    for (double v : y) {
        if (!std::isfinite(v)) return out;
    }
    bool all_equal = true;
    for (double v : y) all_equal = all_equal && std::abs(v - y.back()) <= 1e-12 * (1.0 + std::abs(y.back()));
    if (all_equal) {
        out.value = y.back();
        out.converged = true;
        return out;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / std::log(s[i]);
    const double e1 = quad_intercept(x, y, n / 2);
    const double e2 = quad_intercept(x, y, (2 * n) / 3);
    out.value = e2;
    out.converged = std::isfinite(e1) && std::isfinite(e2) &&
                    std::abs(e1 - e2) <= 0.05 * std::max(1.0, std::abs(e2));
    return out;
}

}  // namespace detail

/// Mikhlin-type bound check: sup over the grid of r^k |d^k m'/dr^k| / m'(r),
/// required finite and stable under grid refinement and range extension.
inline MikhlinReport check_mikhlin(const MultiplierSymbol& sym, int max_k, const MikhlinGrid& grid = {}) {
    MikhlinReport rep;
    if (max_k < 1 || max_k + 1 > sym.max_order) throw DomainError("Mikhlin order out of range");
    if (!sym.monotone()) {
        rep.skipped = true;
        rep.pass = true;
        rep.note = "skipped: family is not monotone increasing";
        return rep;
    }
    auto sweep = [&](double lo, double hi, int per_decade, bool& all_zero, int& sign_changes) {
        std::vector<double> sup(static_cast<std::size_t>(max_k), 0.0);
        const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
        all_zero = true;
        sign_changes = 0;
        int last_sign = 0;
        for (int i = 0; i <= n; ++i) {
            const double r = lo * std::pow(hi / lo, static_cast<double>(i) / n);
            const auto d = derivatives(sym, r, max_k + 1);
            const double mp = d[1];
            if (mp == 0.0) continue;
            all_zero = false;
            double rk = 1.0;
            for (int k = 1; k <= max_k; ++k) {
                rk *= r;
                const double q = rk * std::abs(d[static_cast<std::size_t>(k) + 1]) / std::abs(mp);
                sup[static_cast<std::size_t>(k) - 1] = std::max(sup[static_cast<std::size_t>(k) - 1], q);
            }
            if (r >= 1.0) {
                const int sg = d[2] > 0.0 ? 1 : (d[2] < 0.0 ? -1 : 0);
                if (sg != 0 && last_sign != 0 && sg != last_sign) ++sign_changes;
                if (sg != 0) last_sign = sg;
            }
        }
        return sup;
    };
    bool zero1 = false;
    bool zero2 = false;
    bool zero3 = false;
    int sc1 = 0;
    int sc2 = 0;
    int sc3 = 0;
    const auto base = sweep(grid.r_lo, grid.r_hi, grid.per_decade, zero1, sc1);
    const auto fine = sweep(grid.r_lo, grid.r_hi, 2 * grid.per_decade, zero2, sc2);
    const auto wide = sweep(grid.r_lo, grid.r_hi * 100.0, grid.per_decade, zero3, sc3);
    if (zero1 && zero2) {
        rep.vacuous = true;
        rep.pass = true;
        rep.sup.assign(static_cast<std::size_t>(max_k), 0.0);
        rep.note = "vacuous: m' vanishes identically on the grid";
        return rep;
    }
    rep.sup = fine;
    rep.monotone_derivative = std::max({sc1, sc2, sc3}) < 2;
    bool ok = true;
    for (std::size_t k = 0; k < base.size(); ++k) {
        if (base[k] < 1e-12 && fine[k] < 1e-12 && wide[k] < 1e-12) continue;
        const double ref = std::max(base[k], 1e-300);
        if (!std::isfinite(base[k]) || !std::isfinite(fine[k]) || !std::isfinite(wide[k])) ok = false;
        if (std::abs(fine[k] / ref - 1.0) > 0.1 || std::abs(wide[k] / ref - 1.0) > 0.1) ok = false;
    }
    rep.pass = ok && rep.monotone_derivative;
    if (!rep.monotone_derivative) {
        rep.note = "m' is not eventually monotone (oscillatory symbol)";
    } else if (!ok) {
        rep.note = "suprema not stable under refinement";
    }
    return rep;
}

/// Estimates the growth class of m at infinity and decides the Osgood condition.
inline HypothesisReport classify(const MultiplierSymbol& sym, const ProbeGrid& probe = {}) {
    if (probe.r_lo > 1e4 || probe.r_hi < 1e12 || probe.points < 20) {
        throw DomainError("probe grid must span [1e4, 1e12] with at least 20 points");
    }
    HypothesisReport rep;

    // (H1) on a wide grid.
    rep.h1_positive = true;
    rep.h1_monotone = true;
    for (int i = 0; i <= 180; ++i) {
        const double r = std::pow(10.0, -6.0 + i * 0.1);
        const auto d = derivatives(sym, r, 1);
        if (!(d[0] > 0.0)) rep.h1_positive = false;
        if (d[1] < 0.0) rep.h1_monotone = false;
    }
    if (sym.monotone() && sym.max_order >= 4) {
        rep.h1_mikhlin_sup = check_mikhlin(sym, 3).sup;
    }

    const int n = probe.points;
    std::vector<double> s(static_cast<std::size_t>(n));
    std::vector<double> mt(s.size());
    std::vector<double> a(s.size());
    std::vector<double> b(s.size());
    std::vector<double> b1(s.size());
    std::vector<double> b2(s.size());
    bool derivative_vanishes = true;
    const double s_lo = std::log(probe.r_lo);
    const double s_hi = std::log(probe.r_hi);
    for (int i = 0; i < n; ++i) {
        const double si = s_lo + (s_hi - s_lo) * i / (n - 1);
        const auto d = tilde_derivatives(sym, si, 2);
        const auto k = static_cast<std::size_t>(i);
        s[k] = si;
        mt[k] = d[0];
        a[k] = d[1] / d[0];
        b1[k] = si * a[k];
        b[k] = si * std::log(si) * a[k];
        b2[k] = d[1] != 0.0 ? si * d[2] / d[1] : 0.0;
        if (d[1] != 0.0) derivative_vanishes = false;
    }
    // Power-law symbols overflow m~ long before r_hi; keep the finite prefix.
    std::size_t finite = 0;
    while (finite < mt.size() && std::isfinite(mt[finite]) && std::isfinite(a[finite]) &&
           std::isfinite(b2[finite])) {
        ++finite;
    }
    if (finite < 20 || s[finite - 1] < std::log(1e12)) return rep;
    for (auto* v : {&s, &mt, &a, &b, &b1, &b2}) v->resize(finite);
    for (double v : mt) {
        if (v < 0.0) return rep;
    }
    if (derivative_vanishes || mt.back() == 0.0) {
        rep.h2_class = H2Class::H2c;
        rep.alpha_hat = rep.beta_hat = rep.beta1_hat = 0.0;
        rep.osgood = Osgood::Holds;
        return rep;
    }

    const auto alpha = detail::extrapolate(s, a);
    rep.alpha_hat = alpha.value;
    if (alpha.converged && alpha.value > 0.02) {
        rep.h2_class = alpha.value < 2.0 ? H2Class::H2b : H2Class::Unclassified;
        rep.osgood = alpha.value < 2.0 ? Osgood::Fails : Osgood::Undetermined;
        return rep;
    }
    if (!alpha.converged) return rep;
    if (alpha.value < -0.02) {
        // Decaying symbol (Euler-lambda type): bounded at infinity.
        rep.h2_class = H2Class::H2c;
        rep.osgood = Osgood::Holds;
        return rep;
    }

    // Bounded m: the last quarter of the probes shows no relative growth.
    const std::size_t q = s.size() - s.size() / 4;
    const double rel_growth = std::abs(mt.back() - mt[q]) / std::max(std::abs(mt.back()), 1e-300);
    if (rel_growth < 1e-6 || mt.back() == 0.0) {
        rep.h2_class = H2Class::H2c;
        rep.beta_hat = 0.0;
        rep.beta1_hat = 0.0;
        rep.osgood = Osgood::Holds;
        return rep;
    }

    const auto beta1 = detail::extrapolate(s, b1);
    const auto beta = detail::extrapolate(s, b);
    const auto beta2 = detail::extrapolate(s, b2);
    rep.beta1_hat = beta1.value;
    rep.beta2_hat = beta2.value;
    const bool b_growing = b.back() > b[b.size() - 2];
    if ((beta1.converged && beta1.value > 0.02) || (b.back() > 1e3 && b_growing)) {
        rep.beta_hat = std::numeric_limits<double>::infinity();
    } else if (beta.converged) {
        rep.beta_hat = beta.value;
    } else {
        return rep;
    }
    rep.h2_class = H2Class::H2a;
    if (rep.beta_hat <= 1.0 - kOsgoodBand) {
        rep.osgood = Osgood::Holds;
    } else if (rep.beta_hat >= 1.0 + kOsgoodBand) {
        rep.osgood = Osgood::Fails;
    } else {
        rep.osgood = Osgood::Undetermined;
    }
    return rep;
}

inline nlohmann::json report_to_json(const HypothesisReport& r) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isnan(v)) return nullptr;
        if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
        return v;
    };
    nlohmann::json j;
    j["h1_positive"] = r.h1_positive;
    j["h1_monotone"] = r.h1_monotone;
    j["h1_mikhlin_sup"] = r.h1_mikhlin_sup;
    j["h2_class"] = to_string(r.h2_class);
    j["alpha_hat"] = num(r.alpha_hat);
    j["beta_hat"] = num(r.beta_hat);
    j["beta1_hat"] = num(r.beta1_hat);
    j["beta2_hat"] = num(r.beta2_hat);
    j["osgood"] = to_string(r.osgood);
    return j;
}

}  // namespace patchflow
