#pragma once

// Velocity and symmetric velocity gradient of a multi-patch configuration by
// boundary integrals:
//
//     u(x)    = sum_j a_j  oint Rt(|x - z_j|) z_j'(eta) d eta
//     S(x)    = sym( -sum_j a_j oint K(x - z_j) (z_j2', -z_j1') d eta )
//
// Quadrature: composite Gauss-Legendre panels on node intervals, with a window
// of +-W node intervals around the target handled by panels graded toward the
// (projected) target parameter. Curve points off the node grid come from the
// trigonometric interpolant: shifted node grids by FFT, isolated points by
// direct summation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "patchflow/curve.hpp"
#include "patchflow/error.hpp"
#include "patchflow/kernel.hpp"
#include "patchflow/parallel.hpp"
#include "patchflow/vec2.hpp"

namespace patchflow {

struct QuadratureSettings {
    int window_nodes = 8;    // half-width of the singular window in node intervals
    int far_order = 4;       // Gauss points per node interval outside the window
    int panel_order = 8;     // Gauss points per graded panel inside the window
    int graded_levels = 24;  // dyadic levels toward an on-curve target
    double quad_window = 0;  // parameter half-width in radians; 0 selects window_nodes

    void validate() const {
        if (window_nodes < 1) throw ConfigError("window_nodes must be >= 1");
        if (far_order < 1 || far_order > 20 || panel_order < 1 || panel_order > 20) {
            throw ConfigError("quadrature orders must lie in [1, 20]");
        }
        if (graded_levels < 4 || graded_levels > 60) throw ConfigError("graded_levels must lie in [4, 60]");
        if (quad_window < 0.0 || quad_window > std::numbers::pi / 4) {
            throw ConfigError("quad_window must lie in (0, pi/4]");
        }
    }
};

struct VelocityQuery {
    Vec2 target;
    std::optional<std::pair<std::size_t, std::size_t>> on_boundary;  // (patch, node)
};

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_rule(int q) {
    std::vector<double> x;
    std::vector<double> w;
    auto fill = [&](const auto& abs, const auto& wts) {
        // Boost stores the non-negative half.
        const bool odd = (q % 2) == 1;
        for (std::size_t i = abs.size(); i-- > 0;) {
            if (odd && i == 0) continue;
            x.push_back(-abs[i]);
            w.push_back(wts[i]);
        }
        if (odd) {
            x.push_back(abs[0]);
            w.push_back(wts[0]);
        }
        for (std::size_t i = odd ? 1 : 0; i < abs.size(); ++i) {
            x.push_back(abs[i]);
            w.push_back(wts[i]);
        }
    };
    switch (q) {
#define PATCHFLOW_GAUSS_CASE(Q)                                                         \
    case Q:                                                                             \
        fill(boost::math::quadrature::gauss<double, Q>::abscissa(),                     \
             boost::math::quadrature::gauss<double, Q>::weights());                     \
        break;
        PATCHFLOW_GAUSS_CASE(1)
        PATCHFLOW_GAUSS_CASE(2)
        PATCHFLOW_GAUSS_CASE(3)
        PATCHFLOW_GAUSS_CASE(4)
        PATCHFLOW_GAUSS_CASE(5)
        PATCHFLOW_GAUSS_CASE(6)
        PATCHFLOW_GAUSS_CASE(7)
        PATCHFLOW_GAUSS_CASE(8)
        PATCHFLOW_GAUSS_CASE(9)
        PATCHFLOW_GAUSS_CASE(10)
        PATCHFLOW_GAUSS_CASE(11)
        PATCHFLOW_GAUSS_CASE(12)
        PATCHFLOW_GAUSS_CASE(13)
        PATCHFLOW_GAUSS_CASE(14)
        PATCHFLOW_GAUSS_CASE(15)
        PATCHFLOW_GAUSS_CASE(16)
        PATCHFLOW_GAUSS_CASE(17)
        PATCHFLOW_GAUSS_CASE(18)
        PATCHFLOW_GAUSS_CASE(19)
        PATCHFLOW_GAUSS_CASE(20)
#undef PATCHFLOW_GAUSS_CASE
        default: throw ConfigError("unsupported Gauss order");
    }
    return {x, w};
}

struct Node1D {
    double t;
    double w;
};

/// Panels on [c, end] (end may lie on either side of c) graded toward c:
/// four panels of width delta/2, then widths doubling outward.
inline void graded_panels(double c, double end, double delta, const std::vector<double>& gx,
                          const std::vector<double>& gw, std::vector<Node1D>& out) {
    const double len = std::abs(end - c);
    if (len == 0.0) return;
    const double dir = end > c ? 1.0 : -1.0;
    std::vector<double> breaks{0.0};
    double pos = 0.0;
    const double first = std::max(delta * 0.5, len * 1e-15);
    for (int i = 0; i < 4 && pos < len; ++i) {
        pos = std::min(len, pos + first);
        breaks.push_back(pos);
    }
    while (pos < len) {
        pos = std::min(len, 2.0 * pos);
        breaks.push_back(pos);
    }
    // Merge a sliver at the end into its neighbour.
    if (breaks.size() > 2 && breaks[breaks.size() - 1] - breaks[breaks.size() - 2] < 0.25 * (breaks[breaks.size() - 2] - breaks[breaks.size() - 3])) {
        breaks.erase(breaks.end() - 2);
    }
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p];
        const double b = breaks[p + 1];
        const double half = 0.5 * (b - a);
        for (std::size_t g = 0; g < gx.size(); ++g) out.push_back({c + dir * (a + half * (1.0 + gx[g])), half * gw[g]});
    }
}

}  // namespace detail

/// Boundary-integral evaluator for a fixed configuration. Construction
/// precomputes per-curve quadrature points; evaluation is read-only and safe
/// to call concurrently.
class BiotSavart {
public:
    BiotSavart(const std::vector<PatchCurve>& curves, const KernelTable& table, const QuadratureSettings& qs = {})
        : table_(&table), qs_(qs) {
        qs_.validate();
        std::tie(fx_, fw_) = detail::gauss_rule(qs_.far_order);
        std::tie(px_, pw_) = detail::gauss_rule(qs_.panel_order);
        for (const auto& c : curves) prepare(c);
    }

    [[nodiscard]] std::size_t curve_count() const { return data_.size(); }
    [[nodiscard]] const KernelTable& table() const { return *table_; }

    /// Velocity at an arbitrary point or at a boundary node.
    [[nodiscard]] Vec2 velocity(const VelocityQuery& q) const {
        Vec2 u;
        for (std::size_t c = 0; c < data_.size(); ++c) {
            const auto& d = data_[c];
            if (q.on_boundary && q.on_boundary->first == c) {
                u += on_curve_velocity(d, q.on_boundary->second) * d.strength;
                continue;
            }
            const auto near = nearest_node(d, q.target);
            if (near.second <= 1e-12) {
                if (q.on_boundary) throw SolverHalt("target coincides with a node of another patch (contact)");
                u += on_curve_velocity(d, near.first) * d.strength;
                continue;
            }
            u += off_curve_velocity(d, q.target, near) * d.strength;
        }
        return u;
    }

    [[nodiscard]] Vec2 velocity(Vec2 x) const { return velocity(VelocityQuery{x, std::nullopt}); }

    /// Velocity at every node of every curve (the contour-dynamics right-hand side).
    [[nodiscard]] std::vector<std::vector<Vec2>> velocity_nodes() const {
        std::vector<std::size_t> offset{0};
        for (const auto& d : data_) offset.push_back(offset.back() + static_cast<std::size_t>(d.n));
        std::vector<Vec2> flat(offset.back());
        parallel_for(flat.size(), [&](std::size_t idx) {
            const auto c = static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), idx) - offset.begin()) - 1;
            flat[idx] = velocity(VelocityQuery{data_[c].nodes[idx - offset[c]], std::make_pair(c, idx - offset[c])});
        });
        std::vector<std::vector<Vec2>> out(data_.size());
        for (std::size_t c = 0; c < data_.size(); ++c) {
            out[c].assign(flat.begin() + static_cast<std::ptrdiff_t>(offset[c]),
                          flat.begin() + static_cast<std::ptrdiff_t>(offset[c + 1]));
        }
        return out;
    }

    /// Velocities at free points (tracers).
    [[nodiscard]] std::vector<Vec2> velocity_points(const std::vector<Vec2>& pts) const {
        std::vector<Vec2> out(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { out[i] = velocity(pts[i]); });
        return out;
    }

    /// Symmetric traceless part of grad u at a point off the boundaries.
    [[nodiscard]] Mat2 grad_u_sym(Vec2 x) const {
        Mat2 acc;
        for (const auto& d : data_) {
            const auto near = nearest_node(d, x);
            if (near.second <= 1e-10) throw DomainError("grad_u_sym target within 1e-10 of a boundary node");
            acc += off_curve_grad(d, x, near) * d.strength;
        }
        return acc.sym_traceless();
    }

private:
    struct CurveData {
        int n = 0;
        int window = 8;
        double h = 0.0;
        double strength = 1.0;
        double max_spacing = 0.0;
        TrigCurve trig;
        std::vector<Vec2> nodes;
        std::vector<Vec2> dnodes;  // z' at nodes
        // Far points: index g * n + i is Gauss point g on interval [eta_i, eta_i+1].
        std::vector<Vec2> far_z, far_dz;
        std::vector<double> far_w;  // per Gauss point, interval-independent
        // On-curve window pattern: offsets tau_p with weights, z(eta_k + tau_p) at p * n + k.
        std::vector<double> win_w;
        std::vector<Vec2> win_z, win_dz;
        double tail_eps = 0.0;
    };

    const KernelTable* table_;
    QuadratureSettings qs_;
    std::vector<double> fx_, fw_, px_, pw_;
    std::vector<CurveData> data_;

    void prepare(const PatchCurve& c) {
        CurveData d;
        d.n = static_cast<int>(c.nodes.size());
        if (d.n < 8) throw DomainError("curves need at least 8 nodes");
        d.h = 2.0 * std::numbers::pi / d.n;
        d.strength = c.strength;
        d.nodes = c.nodes;
        d.trig = TrigCurve(c.nodes);
        d.max_spacing = node_spacing_range(c.nodes).second;
        const int w = qs_.quad_window > 0.0 ? static_cast<int>(std::ceil(qs_.quad_window / d.h - 1e-9)) : qs_.window_nodes;
        d.window = std::clamp(w, 1, d.n / 4);
        const auto dn = d.trig.derivative_at_nodes(1, false);
        for (const auto& v : dn) d.dnodes.push_back(to_v(v));

        const auto nq = fx_.size();
        d.far_z.resize(nq * static_cast<std::size_t>(d.n));
        d.far_dz.resize(d.far_z.size());
        for (std::size_t g = 0; g < nq; ++g) {
            const double delta = 0.5 * d.h * (1.0 + fx_[g]);
            const auto z = d.trig.shifted(delta, 0);
            const auto dz = d.trig.shifted(delta, 1);
            for (int i = 0; i < d.n; ++i) {
                d.far_z[g * static_cast<std::size_t>(d.n) + static_cast<std::size_t>(i)] = to_v(z[static_cast<std::size_t>(i)]);
                d.far_dz[g * static_cast<std::size_t>(d.n) + static_cast<std::size_t>(i)] = to_v(dz[static_cast<std::size_t>(i)]);
            }
            d.far_w.push_back(0.5 * d.h * fw_[g]);
        }

        // Dyadic panels [L 2^{-l-1}, L 2^{-l}] on both sides of the target, L = W h.
        const double len = d.window * d.h;
        std::vector<double> offsets;
        for (int side = -1; side <= 1; side += 2) {
            for (int l = 0; l < qs_.graded_levels; ++l) {
                const double b = len * std::ldexp(1.0, -l);
                const double a = 0.5 * b;
                const double half = 0.5 * (b - a);
                for (std::size_t g = 0; g < px_.size(); ++g) {
                    offsets.push_back(side * (a + half * (1.0 + px_[g])));
                    d.win_w.push_back(half * pw_[g]);
                }
            }
        }
        d.tail_eps = len * std::ldexp(1.0, -qs_.graded_levels);
        d.win_z.resize(offsets.size() * static_cast<std::size_t>(d.n));
        d.win_dz.resize(d.win_z.size());
        for (std::size_t p = 0; p < offsets.size(); ++p) {
            const auto z = d.trig.shifted(offsets[p], 0);
            const auto dz = d.trig.shifted(offsets[p], 1);
            for (int i = 0; i < d.n; ++i) {
                d.win_z[p * static_cast<std::size_t>(d.n) + static_cast<std::size_t>(i)] = to_v(z[static_cast<std::size_t>(i)]);
                d.win_dz[p * static_cast<std::size_t>(d.n) + static_cast<std::size_t>(i)] = to_v(dz[static_cast<std::size_t>(i)]);
            }
        }
        data_.push_back(std::move(d));
    }

    [[nodiscard]] double rt(double r2) const { return table_->r_tilde_log(0.5 * std::log(r2)); }

    [[nodiscard]] static std::pair<std::size_t, double> nearest_node(const CurveData& d, Vec2 x) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < d.nodes.size(); ++i) {
            const double r = (d.nodes[i] - x).norm2();
            if (r < bd) {
                bd = r;
                best = i;
            }
        }
        return {best, std::sqrt(bd)};
    }

    /// Sum of the far Gauss points over intervals i not in [skip_lo, skip_lo + skip_count).
    template <class F>
    void far_sum(const CurveData& d, long skip_lo, int skip_count, const F& f) const {
        const int n = d.n;
        const long start = skip_count > 0 ? skip_lo + skip_count : 0;
        const int count = n - skip_count;
        for (std::size_t g = 0; g < d.far_w.size(); ++g) {
            const std::size_t base = g * static_cast<std::size_t>(n);
            const double w = d.far_w[g];
            for (int j = 0; j < count; ++j) {
                const auto i = static_cast<std::size_t>(((start + j) % n + n) % n);
                f(d.far_z[base + i], d.far_dz[base + i], w);
            }
        }
    }

    [[nodiscard]] Vec2 on_curve_velocity(const CurveData& d, std::size_t k) const {
        const Vec2 x = d.nodes[k];
        Vec2 acc;
        far_sum(d, static_cast<long>(k) - d.window, 2 * d.window, [&](Vec2 z, Vec2 dz, double w) {
            acc += dz * (w * rt((x - z).norm2()));
        });
        const std::size_t n = static_cast<std::size_t>(d.n);
        for (std::size_t p = 0; p < d.win_w.size(); ++p) {
            const Vec2 z = d.win_z[p * n + k];
            const Vec2 dz = d.win_dz[p * n + k];
            acc += dz * (d.win_w[p] * rt((x - z).norm2()));
        }
        // Innermost [-eps, eps]: G continued as a local power law rho^-p, for which
        // int_0^eps Rt(s tau) d tau = eps (Rt(s eps) + G(s eps) / (1 - p)).
        const Vec2 t = d.dnodes[k];
        const double speed = t.norm();
        const double le = std::log(speed * d.tail_eps);
        const double g = table_->g_log(le);
        const double g1 = table_->g1_log(le);
        const double p = g != 0.0 ? -std::exp(le) * g1 / g : 0.0;
        if (p >= 1.0) throw DomainError("stream kernel is not integrable at the origin for this symbol");
        const double tail = d.tail_eps * (table_->r_tilde_log(le) + g / (1.0 - p));
        acc += t * (2.0 * tail);
        return acc;
    }

    /// Parameter of the point of the interpolant closest to x, starting from node k.
    [[nodiscard]] static double project_parameter(const CurveData& d, Vec2 x, std::size_t k) {
        double eta = static_cast<double>(k) * d.h;
        const cplx xc = to_c(x);
        for (int it = 0; it < 30; ++it) {
            const cplx z = d.trig.eval(eta, 0) - xc;
            const cplx z1 = d.trig.eval(eta, 1);
            const cplx z2 = d.trig.eval(eta, 2);
            const double g = (std::conj(z) * z1).real();
            const double gp = std::norm(z1) + (std::conj(z) * z2).real();
            double step = gp > 0.0 ? g / gp : g / std::max(std::norm(z1), 1e-300);
            step = std::clamp(step, -d.h, d.h);
            eta -= step;
            if (std::abs(step) < 1e-15) break;
        }
        return eta;
    }

    /// Generic off-curve integral of f(z, z', w) with near-target grading.
    template <class F>
    void off_curve_sum(const CurveData& d, Vec2 x, std::pair<std::size_t, double> near, const F& f) const {
        if (near.second > d.window * d.max_spacing) {
            far_sum(d, 0, 0, f);
            return;
        }
        const double eta_star = project_parameter(d, x, near.first);
        const auto i0 = static_cast<long>(std::lround(eta_star / d.h));
        far_sum(d, i0 - d.window, 2 * d.window, f);
        const cplx zs = d.trig.eval(eta_star, 0);
        const double speed = std::abs(d.trig.eval(eta_star, 1));
        const double delta = std::max(std::abs(zs - to_c(x)) / std::max(speed, 1e-300), 1e-14 * d.h);
        std::vector<detail::Node1D> pts;
        const double lo = static_cast<double>(i0 - d.window) * d.h;
        const double hi = static_cast<double>(i0 + d.window) * d.h;
        detail::graded_panels(eta_star, lo, delta, px_, pw_, pts);
        detail::graded_panels(eta_star, hi, delta, px_, pw_, pts);
        for (const auto& pt : pts) f(to_v(d.trig.eval(pt.t, 0)), to_v(d.trig.eval(pt.t, 1)), pt.w);
    }

    [[nodiscard]] Vec2 off_curve_velocity(const CurveData& d, Vec2 x, std::pair<std::size_t, double> near) const {
        Vec2 acc;
        off_curve_sum(d, x, near, [&](Vec2 z, Vec2 dz, double w) { acc += dz * (w * rt((x - z).norm2())); });
        return acc;
    }

    [[nodiscard]] Mat2 off_curve_grad(const CurveData& d, Vec2 x, std::pair<std::size_t, double> near) const {
        Mat2 acc;
        off_curve_sum(d, x, near, [&](Vec2 z, Vec2 dz, double w) {
            const Vec2 r = x - z;
            const double r2 = r.norm2();
            const Vec2 k = rot90(r) * (table_->g_log(0.5 * std::log(r2)) / r2);
            acc += outer(k, Vec2{dz.y, -dz.x}) * (-w);
        });
        return acc;
    }
};

/// Brute-force area quadrature of sum_j a_j int_{D_j} K(x - y) dy on a
/// resolution x resolution grid over the bounding box. Interior extents along
/// each sample row are exact for a finely resampled boundary; rows are
/// supersampled `row_samples` times per cell. A disk around x of half the
/// distance to the boundary is cut out of every patch; K is odd, so the disk
/// contributes nothing and the remaining integrand is bounded.
inline Vec2 velocity_oracle(const std::vector<PatchCurve>& curves, const KernelTable& table, Vec2 x, int resolution,
                            int row_samples = 4) {
    if (resolution < 4) throw DomainError("oracle resolution must be >= 4");
    Vec2 acc;
    for (const auto& c : curves) {
        // Refine the boundary polygon through the trigonometric interpolant.
        const TrigCurve tc(c.nodes);
        const int m = 16 * static_cast<int>(c.nodes.size());
        std::vector<Vec2> poly(static_cast<std::size_t>(m));
        for (int j = 0; j < 16; ++j) {
            const auto z = tc.shifted(2.0 * std::numbers::pi * j / m, 0);
            for (std::size_t i = 0; i < z.size(); ++i) poly[i * 16 + static_cast<std::size_t>(j)] = to_v(z[i]);
        }
        double xmin = std::numeric_limits<double>::infinity();
        double xmax = -xmin;
        double ymin = xmin;
        double ymax = -xmin;
        for (const auto& p : poly) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const double side = std::max(xmax - xmin, ymax - ymin) * 1.001;
        const double cx = 0.5 * (xmin + xmax);
        const double cy = 0.5 * (ymin + ymax);
        const double x0 = cx - 0.5 * side;
        const double y0 = cy - 0.5 * side;
        const double cell = side / resolution;
        const int rows = resolution * row_samples;
        const double dy = side / rows;
        const double hole = 0.5 * project_to_polygon(poly, x).distance;
        std::vector<Vec2> partial(static_cast<std::size_t>(rows));
        parallel_for(static_cast<std::size_t>(rows), [&](std::size_t row) {
            const double y = y0 + (static_cast<double>(row) + 0.5) * dy;
            std::vector<double> xs;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const Vec2 a = poly[i];
                const Vec2 b = poly[(i + 1) % poly.size()];
                if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            std::sort(xs.begin(), xs.end());
            const double hy = y - x.y;
            const double hw = std::abs(hy) < hole ? std::sqrt(hole * hole - hy * hy) : -1.0;
            std::vector<std::pair<double, double>> spans;
            for (std::size_t s = 0; s + 1 < xs.size(); s += 2) {
                if (hw < 0.0 || xs[s + 1] <= x.x - hw || xs[s] >= x.x + hw) {
                    spans.emplace_back(xs[s], xs[s + 1]);
                    continue;
                }
                if (xs[s] < x.x - hw) spans.emplace_back(xs[s], x.x - hw);
                if (xs[s + 1] > x.x + hw) spans.emplace_back(x.x + hw, xs[s + 1]);
            }
            Vec2 rs;
            for (const auto& [xa, xb] : spans) {
                auto c0 = static_cast<long>(std::floor((xa - x0) / cell));
                const auto c1 = static_cast<long>(std::floor((xb - x0) / cell));
                for (long ci = c0; ci <= c1; ++ci) {
                    const double lo = std::max(xa, x0 + ci * cell);
                    const double hi = std::min(xb, x0 + (ci + 1) * cell);
                    if (hi <= lo) continue;
                    const double xm = ci == c0 || ci == c1 ? 0.5 * (lo + hi) : x0 + (ci + 0.5) * cell;
                    const Vec2 r = x - Vec2{xm, y};
                    const double r2 = r.norm2();
                    if (r2 == 0.0) continue;
                    rs += rot90(r) * (table.g(std::sqrt(r2)) / r2 * (hi - lo) * dy);
                }
            }
            partial[row] = rs;
        });
        Vec2 sum;
        for (const auto& v : partial) sum += v;
        acc += sum * c.strength;
    }
    return acc;
}

}  // namespace patchflow
