#pragma once

// Closed periodic curves: node storage, trigonometric interpolation, spectral
// derivatives, arc-length resampling and initial shapes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "patchflow/error.hpp"
#include "patchflow/vec2.hpp"

namespace patchflow {

using cplx = std::complex<double>;

inline cplx to_c(Vec2 v) { return {v.x, v.y}; }
inline Vec2 to_v(cplx c) { return {c.real(), c.imag()}; }

/// A closed patch boundary sampled at uniform parameter values xi_i = 2 pi i / N,
/// oriented counterclockwise.
struct PatchCurve {
    std::vector<Vec2> nodes;
    double strength = 1.0;
    std::string id;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
    [[nodiscard]] double spacing() const { return 2.0 * std::numbers::pi / static_cast<double>(nodes.size()); }
};

/// Fourier representation z(eta) = sum_n Z_n e^{i n eta} of the complex curve
/// x + i y, with the Nyquist mode (even N) split symmetrically so that the
/// interpolant of real data is real.
class TrigCurve {
public:
    TrigCurve() = default;

    explicit TrigCurve(const std::vector<Vec2>& nodes) {
        n_ = static_cast<int>(nodes.size());
        if (n_ < 4) throw DomainError("curve needs at least 4 nodes");
        std::vector<cplx> z(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) z[i] = to_c(nodes[i]);
        Eigen::FFT<double> fft;
        fft.fwd(coef_, z);
        for (auto& c : coef_) c /= static_cast<double>(n_);
    }

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] const std::vector<cplx>& coefficients() const { return coef_; }

    /// Signed wavenumber stored at index k.
    [[nodiscard]] int wavenumber(int k) const { return k <= n_ / 2 ? k : k - n_; }
    [[nodiscard]] bool nyquist(int k) const { return n_ % 2 == 0 && k == n_ / 2; }

    /// d-th derivative of the interpolant at an arbitrary eta; O(N).
    [[nodiscard]] cplx eval(double eta, int d = 0) const {
        cplx sum = 0.0;
        for (int k = 0; k < n_; ++k) {
            if (nyquist(k)) {
                sum += coef_[static_cast<std::size_t>(k)] * nyquist_term(eta, d);
                continue;
            }
            const int w = wavenumber(k);
            sum += coef_[static_cast<std::size_t>(k)] * ipow(w, d) * std::polar(1.0, w * eta);
        }
        return sum;
    }

    /// d-th derivative at eta_j + delta for every node j, by one inverse FFT.
    [[nodiscard]] std::vector<cplx> shifted(double delta, int d = 0) const {
        std::vector<cplx> c(coef_.size());
        for (int k = 0; k < n_; ++k) {
            if (nyquist(k)) {
                // cos(N(eta_j + delta)/2) = (-1)^j cos(N delta / 2), which the FFT supplies.
                c[static_cast<std::size_t>(k)] = coef_[static_cast<std::size_t>(k)] * nyquist_term(delta, d);
                continue;
            }
            const int w = wavenumber(k);
            c[static_cast<std::size_t>(k)] = coef_[static_cast<std::size_t>(k)] * ipow(w, d) * std::polar(1.0, w * delta);
        }
        Eigen::FFT<double> fft;
        fft.SetFlag(Eigen::FFT<double>::Unscaled);
        std::vector<cplx> out;
        fft.inv(out, c);
        return out;
    }

    /// Spectral d-th derivative at the nodes; modes above N/3 are removed for d >= 2.
    [[nodiscard]] std::vector<cplx> derivative_at_nodes(int d, bool dealias) const {
        std::vector<cplx> c(coef_.size());
        for (int k = 0; k < n_; ++k) {
            const int w = wavenumber(k);
            if (nyquist(k) && d > 0) continue;
            if (dealias && 3 * std::abs(w) > n_) continue;
            c[static_cast<std::size_t>(k)] = coef_[static_cast<std::size_t>(k)] * ipow(w, d);
        }
        Eigen::FFT<double> fft;
        fft.SetFlag(Eigen::FFT<double>::Unscaled);
        std::vector<cplx> out;
        fft.inv(out, c);
        return out;
    }

private:
    int n_ = 0;
    std::vector<cplx> coef_;

    /// (i w)^d
    static cplx ipow(int w, int d) {
        cplx r = 1.0;
        for (int i = 0; i < d; ++i) r *= cplx(0.0, static_cast<double>(w));
        return r;
    }

    /// d-th derivative of cos(N eta / 2).
    [[nodiscard]] double nyquist_term(double eta, int d) const {
        const double m = 0.5 * n_;
        const double a = m * eta;
        switch (d % 4) {
            case 0: return std::pow(m, d) * std::cos(a);
            case 1: return -std::pow(m, d) * std::sin(a);
            case 2: return -std::pow(m, d) * std::cos(a);
            default: return std::pow(m, d) * std::sin(a);
        }
    }
};

// ---------------------------------------------------------------------------
// Geometry of a node polygon

/// Signed area of the trigonometric interpolant, (1/2) int (x y' - y x') d eta.
inline double spectral_area(const std::vector<Vec2>& nodes) {
    const TrigCurve tc(nodes);
    // With z = sum Z_n e^{i n eta}: (1/2) int Im(conj(z) z') = pi sum n |Z_n|^2.
    double s = 0.0;
    for (int k = 0; k < tc.size(); ++k) {
        if (tc.nyquist(k)) continue;  // cos mode: contributes nothing
        s += tc.wavenumber(k) * std::norm(tc.coefficients()[static_cast<std::size_t>(k)]);
    }
    return std::numbers::pi * s;
}

/// Shoelace area of the node polygon.
inline double polygon_area(const std::vector<Vec2>& nodes) {
    double s = 0.0;
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(nodes[i], nodes[(i + 1) % n]);
    return 0.5 * s;
}

/// Perimeter of the interpolant by the periodic trapezoid rule on |z'|.
inline double perimeter(const std::vector<Vec2>& nodes) {
    const TrigCurve tc(nodes);
    const auto d1 = tc.derivative_at_nodes(1, false);
    double s = 0.0;
    for (const auto& v : d1) s += std::abs(v);
    return s * 2.0 * std::numbers::pi / static_cast<double>(nodes.size());
}

inline std::pair<double, double> node_spacing_range(const std::vector<Vec2>& nodes) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (nodes[(i + 1) % n] - nodes[i]).norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// True when two non-adjacent edges of the node polygon cross.
inline bool self_intersects(const std::vector<Vec2>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> xmin(n), xmax(n), ymin(n), ymax(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = nodes[i];
        const Vec2 b = nodes[(i + 1) % n];
        xmin[i] = std::min(a.x, b.x);
        xmax[i] = std::max(a.x, b.x);
        ymin[i] = std::min(a.y, b.y);
        ymax[i] = std::max(a.y, b.y);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (xmax[i] < xmin[j] || xmax[j] < xmin[i] || ymax[i] < ymin[j] || ymax[j] < ymin[i]) continue;
            if (segments_cross(nodes[i], nodes[(i + 1) % n], nodes[j], nodes[(j + 1) % n])) return true;
        }
    }
    return false;
}

/// Even-odd point-in-polygon test.
inline bool inside_polygon(const std::vector<Vec2>& nodes, Vec2 p) {
    bool in = false;
    const std::size_t n = nodes.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = nodes[i];
        const Vec2 b = nodes[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) in = !in;
        }
    }
    return in;
}

/// Distance from p to the node polygon, with the closest point and its edge.
struct Projection {
    double distance = 0.0;
    Vec2 point;
    std::size_t edge = 0;
    double along = 0.0;  // fraction along the edge
    bool ambiguous = false;
};

inline Projection project_to_polygon(const std::vector<Vec2>& nodes, Vec2 p) {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = nodes[i];
        const Vec2 e = nodes[(i + 1) % n] - a;
        const double len2 = e.norm2();
        double t = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 q = a + e * t;
        const double d = (p - q).norm();
        if (d < best.distance - 1e-14 * (1.0 + d)) {
            best = {d, q, i, t, false};
        } else if (std::abs(d - best.distance) <= 1e-14 * (1.0 + d) && (q - best.point).norm() > 1e-12) {
            best.ambiguous = true;
        }
    }
    return best;
}

/// Reverses orientation when the node polygon is clockwise.
inline void make_ccw(PatchCurve& c) {
    if (polygon_area(c.nodes) < 0.0) std::reverse(c.nodes.begin() + 1, c.nodes.end());
}

// ---------------------------------------------------------------------------
// Arc-length resampling

/// Resamples the trigonometric interpolant at equal arc-length steps.
inline std::vector<Vec2> reparameterize(const std::vector<Vec2>& nodes, int target_nodes) {
    if (target_nodes < 4) throw DomainError("reparameterize needs at least 4 target nodes");
    const TrigCurve tc(nodes);
    const int n = tc.size();
    // Speed |z'| on a 4x finer grid, then its Fourier series for the arc length.
    const int m = 4 * std::max(n, target_nodes);
    std::vector<double> speed(static_cast<std::size_t>(m));
    {
        // Fine-grid values via zero padding.
        std::vector<cplx> pad(static_cast<std::size_t>(m), 0.0);
        for (int k = 0; k < n; ++k) {
            if (tc.nyquist(k)) {
                const cplx half = 0.5 * tc.coefficients()[static_cast<std::size_t>(k)] * cplx(0.0, 0.5 * n);
                pad[static_cast<std::size_t>(n / 2)] += half;
                pad[static_cast<std::size_t>(m - n / 2)] -= half;
                continue;
            }
            const int w = tc.wavenumber(k);
            pad[static_cast<std::size_t>((w + m) % m)] = tc.coefficients()[static_cast<std::size_t>(k)] * cplx(0.0, w);
        }
        Eigen::FFT<double> fft;
        fft.SetFlag(Eigen::FFT<double>::Unscaled);
        std::vector<cplx> d1;
        fft.inv(d1, pad);
        for (int i = 0; i < m; ++i) speed[static_cast<std::size_t>(i)] = std::abs(d1[static_cast<std::size_t>(i)]);
    }
    std::vector<cplx> sc;
    {
        Eigen::FFT<double> fft;
        std::vector<cplx> sp(speed.begin(), speed.end());
        fft.fwd(sc, sp);
        for (auto& c : sc) c /= static_cast<double>(m);
    }
    const double mean = sc[0].real();
    const double length = 2.0 * std::numbers::pi * mean;
    if (!(length > 0.0)) throw DomainError("degenerate curve: zero length");
    // s(eta) = mean * eta + sum_{w != 0} c_w / (i w) e^{i w eta}, and s'(eta) = speed.
    const int kmax = m / 2 - 1;
    auto arc = [&](double eta, double& ds) {
        double s = mean * eta;
        double d = mean;
        for (int w = 1; w <= kmax; ++w) {
            const cplx c = sc[static_cast<std::size_t>(w)];
            const cplx e = std::polar(1.0, w * eta);
            // c e / (i w) + conj(c e / (i w)) = 2 Re(c e / (i w))
            s += 2.0 * (c * e / cplx(0.0, w)).real();
            d += 2.0 * (c * e).real();
        }
        ds = d;
        return s;
    };
    double s_ref_d = 0.0;
    const double s0 = arc(0.0, s_ref_d);
    std::vector<Vec2> out(static_cast<std::size_t>(target_nodes));
    double eta = 0.0;
    for (int j = 0; j < target_nodes; ++j) {
        const double target = s0 + length * j / target_nodes;
        if (j > 0) eta += 2.0 * std::numbers::pi / target_nodes;  // initial guess near the previous root
        for (int it = 0; it < 50; ++it) {
            double ds = 0.0;
            const double g = arc(eta, ds) - target;
            if (!(ds > 0.0)) throw DomainError("degenerate curve: vanishing speed during resampling");
            const double step = g / ds;
            eta -= step;
            if (std::abs(step) < 1e-15) break;
        }
        out[static_cast<std::size_t>(j)] = to_v(tc.eval(eta));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shapes

inline std::vector<Vec2> circle_nodes(Vec2 center, double radius, int n) {
    std::vector<Vec2> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        v[static_cast<std::size_t>(i)] = center + Vec2{radius * std::cos(t), radius * std::sin(t)};
    }
    return v;
}

/// Ellipse with semi-axes a (along angle) and b.
inline std::vector<Vec2> ellipse_nodes(Vec2 center, double a, double b, double angle, int n) {
    std::vector<Vec2> v(static_cast<std::size_t>(n));
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        const double x = a * std::cos(t);
        const double y = b * std::sin(t);
        v[static_cast<std::size_t>(i)] = center + Vec2{ca * x - sa * y, sa * x + ca * y};
    }
    return v;
}

struct FourierMode {
    int k = 0;
    double a = 0.0;  // cos coefficient
    double b = 0.0;  // sin coefficient
};

/// Star-shaped curve r(theta) = r0 + sum (a_k cos k theta + b_k sin k theta).
inline std::vector<Vec2> fourier_nodes(Vec2 center, double r0, const std::vector<FourierMode>& modes, int n) {
    std::vector<Vec2> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        double r = r0;
        for (const auto& md : modes) r += md.a * std::cos(md.k * t) + md.b * std::sin(md.k * t);
        if (!(r > 0.0)) throw ConfigError("fourier shape radius must stay positive");
        v[static_cast<std::size_t>(i)] = center + Vec2{r * std::cos(t), r * std::sin(t)};
    }
    return v;
}

/// Polygon vertices sampled at n points equally spaced in arc length.
inline std::vector<Vec2> polygon_nodes(const std::vector<Vec2>& vertices, int n) {
    if (vertices.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
    std::vector<Vec2> verts = vertices;
    if (polygon_area(verts) < 0.0) std::reverse(verts.begin(), verts.end());
    const std::size_t m = verts.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + (verts[(i + 1) % m] - verts[i]).norm();
    const double total = cum[m];
    std::vector<Vec2> out(static_cast<std::size_t>(n));
    std::size_t e = 0;
    for (int j = 0; j < n; ++j) {
        const double s = total * j / n;
        while (e + 1 < m && cum[e + 1] <= s) ++e;
        const double f = (s - cum[e]) / (cum[e + 1] - cum[e]);
        out[static_cast<std::size_t>(j)] = verts[e] + (verts[(e + 1) % m] - verts[e]) * f;
    }
    return out;
}

}  // namespace patchflow
