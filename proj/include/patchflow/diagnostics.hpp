#pragma once

// Regularity functionals on discrete curves and envelope checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "patchflow/biot_savart.hpp"
#include "patchflow/contour.hpp"
#include "patchflow/curve.hpp"
#include "patchflow/error.hpp"
#include "patchflow/osgood.hpp"

namespace patchflow {

/// max_{i<j} |d^k z(xi_i) - d^k z(xi_j)| / |z_i - z_j|^gamma with spectral
/// derivatives (2/3 de-aliasing for k >= 2).
inline double holder_seminorm(const std::vector<Vec2>& nodes, int k, double gamma) {
    if (k < 1) throw DomainError("holder_seminorm needs k >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("holder_seminorm needs gamma in (0, 1)");
    if (nodes.size() < static_cast<std::size_t>(4 * k + 4)) throw DomainError("too few nodes for derivative order");
    const auto d = TrigCurve(nodes).derivative_at_nodes(k, k >= 2);
    double best = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double chord = (nodes[i] - nodes[j]).norm();
            if (chord == 0.0) throw DomainError("duplicate nodes");
            best = std::max(best, std::abs(d[i] - d[j]) / std::pow(chord, gamma));
        }
    }
    return best;
}

/// min |d z / d xi| over the nodes.
inline double w_inf(const std::vector<Vec2>& nodes) {
    const auto d = TrigCurve(nodes).derivative_at_nodes(1, false);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : d) best = std::min(best, std::abs(v));
    return best;
}

inline double delta_gamma(const std::vector<Vec2>& nodes, double gamma) {
    const double w = w_inf(nodes);
    if (!(w > 0.0)) throw DomainError("w_inf vanishes");
    return holder_seminorm(nodes, 1, gamma) / w + 1.0;
}

inline double max_curvature(const std::vector<Vec2>& nodes) {
    const TrigCurve tc(nodes);
    const auto d1 = tc.derivative_at_nodes(1, false);
    const auto d2 = tc.derivative_at_nodes(2, true);
    double best = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        const double s = std::abs(d1[i]);
        best = std::max(best, std::abs((std::conj(d1[i]) * d2[i]).imag()) / (s * s * s));
    }
    return best;
}

struct DefectResult {
    double defect = 0.0;  // H^1 of the symmetric difference, radians
    double d_x = 0.0;
    Vec2 nearest;
    bool ambiguous = false;
};

/// Measure of S_rho(x) (directions z with x + rho z inside) symmetric-difference
/// the half circle facing the inward normal at the nearest boundary point.
/// Transitions of the inside predicate found on `samples` angles are refined
/// by bisection, so the result is exact for the polygon.
inline DefectResult geometric_defect(const std::vector<Vec2>& nodes, Vec2 x, double rho, int samples = 10000) {
    if (!(rho > 0.0)) throw DomainError("geometric_defect needs rho > 0");
    if (samples < 16) throw DomainError("too few angular samples");
    DefectResult out;
    const auto proj = project_to_polygon(nodes, x);
    out.d_x = proj.distance;
    out.nearest = proj.point;
    out.ambiguous = proj.ambiguous;
    const std::size_t n = nodes.size();
    const Vec2 edge = nodes[(proj.edge + 1) % n] - nodes[proj.edge];
    Vec2 inward = rot90(edge);  // left of a CCW edge
    inward = inward * (1.0 / inward.norm());
    const double theta_n = std::atan2(inward.y, inward.x);
    const double two_pi = 2.0 * std::numbers::pi;

    auto inside = [&](double th) { return inside_polygon(nodes, x + Vec2{std::cos(th), std::sin(th)} * rho); };
    auto in_sigma = [&](double th) { return std::cos(th - theta_n) >= 0.0; };

    std::vector<double> breaks{0.0, two_pi};
    auto wrap = [&](double th) {
        th = std::fmod(th, two_pi);
        return th < 0.0 ? th + two_pi : th;
    };
    breaks.push_back(wrap(theta_n + 0.5 * std::numbers::pi));
    breaks.push_back(wrap(theta_n - 0.5 * std::numbers::pi));
    const double step = two_pi / samples;
    bool prev = inside(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double th = i * step;
        const bool cur = inside(th);
        if (cur != prev) {
            double a = th - step;
            double b = th;
            for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                (inside(m) == prev ? a : b) = m;
            }
            breaks.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (b <= a) continue;
        const double m = 0.5 * (a + b);
        if (inside(m) != in_sigma(m)) out.defect += b - a;
    }
    return out;
}

/// Right-hand side of the geometric lemma bound for given d_x, rho, gamma, Delta_gamma.
inline double geometric_defect_bound(double d_x, double rho, double gamma, double delta) {
    const double dg = std::pow(delta, -1.0 / gamma);
    const double pg = std::pow(2.0, gamma);
    return 2.0 * std::numbers::pi * ((1.0 + pg) * d_x / rho + pg * std::pow(rho / dg, gamma));
}

// Envelope checks -----------------------------------------------------------

enum class EnvelopeKind { FlowPair, Separation };

struct EnvelopeCheck {
    std::vector<double> times;
    std::vector<double> series;
    std::vector<double> lower;  // envelope at fitted_C
    std::vector<double> upper;  // +inf for Separation
    double fitted_c = 0.0;
    bool pass = false;
    bool converged = false;
    double refinement_ratio = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline bool envelope_holds(const OsgoodProfile& prof, EnvelopeKind kind, const std::vector<double>& t,
                           const std::vector<double>& s, double c) {
    const double s0 = s.front();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto b = kind == EnvelopeKind::FlowPair ? prof.envelope_flow_bound(s0, t[i], c)
                                                       : prof.envelope_separation(s0, t[i], c);
        const double slack = 1e-12 * s0;
        if (s[i] < b.lower - slack) return false;
        if (kind == EnvelopeKind::FlowPair && s[i] > b.upper + slack) return false;
    }
    return true;
}

}  // namespace detail

inline constexpr double kEnvelopeCMin = 1e-12;
inline constexpr double kEnvelopeCMax = 1e6;

/// Smallest C in [kEnvelopeCMin, kEnvelopeCMax] (bisection in log C) for which the
/// envelope dominates the series. Times are measured from times.front().
inline EnvelopeCheck envelope_check(const std::vector<double>& times, const std::vector<double>& series,
                                    const OsgoodProfile& prof, EnvelopeKind kind) {
    if (times.empty() || times.size() != series.size()) throw DomainError("envelope_check needs a nonempty series");
    if (!(series.front() > 0.0)) throw DomainError("envelope_check needs a positive initial value");
    EnvelopeCheck out;
    out.series = series;
    for (double t : times) out.times.push_back(t - times.front());
    const auto& t = out.times;
    if (!detail::envelope_holds(prof, kind, t, series, kEnvelopeCMax)) {
        out.fitted_c = std::numeric_limits<double>::infinity();
        out.converged = true;
        out.pass = false;
        return out;
    }
    double lo = std::log(kEnvelopeCMin);
    double hi = std::log(kEnvelopeCMax);
    if (detail::envelope_holds(prof, kind, t, series, kEnvelopeCMin)) {
        hi = lo;
    } else {
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (detail::envelope_holds(prof, kind, t, series, std::exp(mid)) ? hi : lo) = mid;
        }
    }
    out.fitted_c = std::exp(hi);
    out.converged = true;
    out.pass = true;
    for (double ti : t) {
        const auto b = kind == EnvelopeKind::FlowPair ? prof.envelope_flow_bound(series.front(), ti, out.fitted_c)
                                                       : prof.envelope_separation(series.front(), ti, out.fitted_c);
        out.lower.push_back(b.lower);
        out.upper.push_back(kind == EnvelopeKind::FlowPair ? b.upper : std::numeric_limits<double>::infinity());
    }
    return out;
}

/// Sets check.refinement_ratio = C(refined) / C(check).
inline void attach_refinement(EnvelopeCheck& check, const EnvelopeCheck& refined) {
    check.refinement_ratio = refined.fitted_c / check.fitted_c;
}

// Flow-map divergence -------------------------------------------------------

/// delta(t) for two tracer histories sampled at the same times:
/// sum_i w_i |A_i - B_i| / sum_i w_i.
inline std::vector<double> flow_divergence(const std::vector<std::vector<Vec2>>& run_a,
                                           const std::vector<std::vector<Vec2>>& run_b,
                                           const std::vector<double>& weights) {
    if (run_a.size() != run_b.size()) throw DomainError("flow_divergence: histories differ in length");
    std::vector<double> out;
    for (std::size_t k = 0; k < run_a.size(); ++k) {
        if (run_a[k].size() != run_b[k].size() || run_a[k].size() != weights.size()) {
            throw DomainError("flow_divergence: mismatched tracer sets");
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            num += std::abs(weights[i]) * (run_a[k][i] - run_b[k][i]).norm();
            den += std::abs(weights[i]);
        }
        out.push_back(den > 0.0 ? num / den : 0.0);
    }
    return out;
}

// Velocity-based diagnostics ------------------------------------------------

/// max over boundary nodes of |S(grad u) w . w|, w the unit tangent, evaluated
/// 1e-6 node spacings inside along the normal.
inline double grad_u_tangential_max(const std::vector<PatchCurve>& curves, const KernelTable& table,
                                    const QuadratureSettings& qs = {}) {
    const BiotSavart bs(curves, table, qs);
    double best = 0.0;
    for (const auto& c : curves) {
        const auto d1 = TrigCurve(c.nodes).derivative_at_nodes(1, false);
        const std::size_t n = c.nodes.size();
        std::vector<double> vals(n);
        parallel_for(n, [&](std::size_t i) {
            const Vec2 w = to_v(d1[i]) * (1.0 / std::abs(d1[i]));
            const double spacing = (c.nodes[(i + 1) % n] - c.nodes[i]).norm();
            const Vec2 x = c.nodes[i] + rot90(w) * (1e-6 * spacing);
            const Mat2 s = bs.grad_u_sym(x);
            vals[i] = std::abs(dot(s * w, w));
        });
        for (double v : vals) best = std::max(best, v);
    }
    return best;
}

/// sup over node pairs of one curve of |u_i - u_j| / (|z_i - z_j| (m(1/|z_i - z_j|) + 1)).
inline double velocity_modulus_ratio(const PatchCurve& curve, const std::vector<Vec2>& velocity,
                                     const MultiplierSymbol& sym) {
    double best = 0.0;
    for (std::size_t i = 0; i < curve.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < curve.nodes.size(); ++j) {
            const double r = (curve.nodes[i] - curve.nodes[j]).norm();
            best = std::max(best, (velocity[i] - velocity[j]).norm() / (r * (sym(1.0 / r) + 1.0)));
        }
    }
    return best;
}

/// Ratio |u_j(x)| d / (|a_j| (m(1/d) + 1)) maximized over nodes x of curve i and
/// curves j != i, where d is the distance between curves i and j.
inline double far_field_ratio(const std::vector<PatchCurve>& curves, std::size_t i, const KernelTable& table,
                              const QuadratureSettings& qs = {}) {
    double best = 0.0;
    for (std::size_t j = 0; j < curves.size(); ++j) {
        if (j == i) continue;
        const double d = min_inter_patch_distance({curves[i], curves[j]});
        PatchCurve unit = curves[j];
        unit.strength = 1.0;
        const BiotSavart bs({unit}, table, qs);
        const auto u = bs.velocity_points(curves[i].nodes);
        const double scale = d / (table.symbol()(1.0 / d) + 1.0);
        for (const auto& v : u) best = std::max(best, v.norm() * scale);
    }
    return best;
}

// Records ---------------------------------------------------------------------

struct PatchDiagnostics {
    std::string id;
    double area = 0.0;
    double perimeter = 0.0;
    double w_inf = 0.0;
    double max_curvature = 0.0;
    std::map<std::pair<int, double>, double> holder;  // (k, gamma)
    std::map<double, double> delta_gamma;
};

struct DiagnosticRecord {
    double t = 0.0;
    std::vector<PatchDiagnostics> patches;
    double min_dist = std::numeric_limits<double>::infinity();
    std::vector<double> tracer_pair_sep;
};

struct DiagnosticSettings {
    std::vector<double> gammas{0.5};
    int max_k = 1;
    std::vector<std::pair<std::size_t, std::size_t>> tracer_pairs;

    void validate() const {
        if (gammas.empty()) throw ConfigError("gamma_list must be nonempty");
        for (double g : gammas) {
            if (!(g > 0.0 && g < 1.0)) throw ConfigError("gamma values must lie in (0, 1)");
        }
        if (max_k < 1) throw ConfigError("max_k must be >= 1");
    }
};

inline DiagnosticRecord compute_record(double t, const std::vector<PatchCurve>& curves, const std::vector<Vec2>& tracers,
                                       const DiagnosticSettings& ds) {
    DiagnosticRecord rec;
    rec.t = t;
    for (const auto& c : curves) {
        PatchDiagnostics p;
        p.id = c.id;
        p.area = spectral_area(c.nodes);
        p.perimeter = perimeter(c.nodes);
        p.w_inf = w_inf(c.nodes);
        p.max_curvature = max_curvature(c.nodes);
        for (int k = 1; k <= ds.max_k; ++k) {
            for (double g : ds.gammas) p.holder[{k, g}] = holder_seminorm(c.nodes, k, g);
        }
        for (double g : ds.gammas) p.delta_gamma[g] = p.holder[{1, g}] / p.w_inf + 1.0;
        rec.patches.push_back(std::move(p));
    }
    if (curves.size() > 1) rec.min_dist = min_inter_patch_distance(curves);
    for (const auto& [a, b] : ds.tracer_pairs) {
        if (a >= tracers.size() || b >= tracers.size()) throw ConfigError("tracer pair index out of range");
        rec.tracer_pair_sep.push_back((tracers[a] - tracers[b]).norm());
    }
    return rec;
}

}  // namespace patchflow
