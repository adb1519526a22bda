#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "patchflow/patchflow.hpp"

using namespace patchflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}

PatchCurve patch(std::vector<Vec2> nodes, double strength = 1.0, std::string id = "p0") {
    PatchCurve c;
    c.nodes = std::move(nodes);
    c.strength = strength;
    c.id = std::move(id);
    return c;
}

const KernelTable& loglog1_table() {
    static const KernelTable tab = KernelTable::build(MultiplierSymbol::loglog_euler(1.0), {});
    return tab;
}

/// Principal-axis angle from polygon second moments.
double axis_angle(const std::vector<Vec2>& p) {
    double a = 0.0, cx = 0.0, cy = 0.0, ixx = 0.0, iyy = 0.0, ixy = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 u = p[i];
        const Vec2 v = p[(i + 1) % p.size()];
        const double c = u.x * v.y - v.x * u.y;
        a += c;
        cx += (u.x + v.x) * c;
        cy += (u.y + v.y) * c;
        ixx += (u.x * u.x + u.x * v.x + v.x * v.x) * c;
        iyy += (u.y * u.y + u.y * v.y + v.y * v.y) * c;
        ixy += (u.x * v.y + 2 * u.x * u.y + 2 * v.x * v.y + v.x * u.y) * c;
    }
    a *= 0.5;
    cx /= 6 * a;
    cy /= 6 * a;
    ixx = ixx / 12 - a * cx * cx;
    iyy = iyy / 12 - a * cy * cy;
    ixy = ixy / 24 - a * cx * cy;
    return 0.5 * std::atan2(2 * ixy, ixx - iyy);
}

// 1 ---------------------------------------------------------------------------
Outcome euler_kernel() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto tab = KernelTable::build(MultiplierSymbol::euler(), {});
    double err = 0.0;
    for (double r : logspace(1e-6, 1e2, 100)) {
        err = std::max(err, std::abs(2 * kPi * tab.g(r) - 1.0));
        err = std::max(err, std::abs(2 * kPi * g_eval(MultiplierSymbol::euler(), r) - 1.0));
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {err <= 1e-10 && s < 1.0, fmt("max|2 pi G - 1| = %.2e (tol 1e-10), %.2f s (limit 1 s)", err, s)};
}

// 2 ---------------------------------------------------------------------------
Outcome alpha_power_law() {
    const auto t0 = std::chrono::steady_clock::now();
    double slope_err = 0.0;
    double flat_err = 0.0;
    for (double a : {0.3, 1.0, 1.5}) {
        const auto tab = KernelTable::build(MultiplierSymbol::alpha_sqg(a), {});
        const auto rs = logspace(1e-3, 1.0, 61);
        double lo = 1e300;
        double hi = 0.0;
        for (double r : rs) {
            slope_err = std::max(slope_err, std::abs(r * tab.g1(r) / tab.g(r) + a));
            const double c = tab.g(r) * std::pow(r, a);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        // Least-squares slope of log G against log rho.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double r : rs) {
            const double x = std::log(r);
            const double y = std::log(tab.g(r));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(rs.size());
        slope_err = std::max(slope_err, std::abs((n * sxy - sx * sy) / (n * sxx - sx * sx) + a));
        flat_err = std::max(flat_err, hi / lo - 1.0);
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {slope_err <= 1e-4 && flat_err <= 1e-5 && s < 30.0,
            fmt("max|slope + alpha| = %.2e (tol 1e-4), G rho^alpha spread %.2e (tol 1e-5), %.1f s (limit 30 s)",
                slope_err, flat_err, s)};
}

// 3 ---------------------------------------------------------------------------
Outcome loglog_asymptotics() {
    bool ok = true;
    std::string detail;
    for (double beta : {0.5, 1.0}) {
        const auto sym = MultiplierSymbol::loglog_euler(beta);
        const KernelTable local = beta == 1.0 ? KernelTable{} : KernelTable::build(sym, {});
        const KernelTable& tab = beta == 1.0 ? loglog1_table() : local;
        const double top = std::min(tab.c0(), tab.rho_max());
        // Ratios on the table nodes and on a 4x finer interpolated grid.
        auto ranges = [&](int refine) {
            std::array<double, 4> r{1e300, 0.0, 1e300, 0.0};
            const double t_lo = std::log(std::max(1e-8, tab.rho_min()));
            const double t_hi = std::log(top);
            const double h = std::log(tab.rho_at(1) / tab.rho_at(0)) / refine;
            const int steps = static_cast<int>(std::ceil((t_hi - t_lo) / h));
            for (int i = 0; i <= steps; ++i) {
                const double rho = std::exp(std::min(t_lo + i * h, t_hi));
                const double m = sym(1.0 / rho);
                const double a = tab.g(rho) / m;
                const double b = std::abs(tab.g1(rho)) * rho / m;
                r[0] = std::min(r[0], a);
                r[1] = std::max(r[1], a);
                r[2] = std::min(r[2], b);
                r[3] = std::max(r[3], b);
            }
            return r;
        };
        const auto coarse = ranges(1);
        const auto fine = ranges(4);
        double drift = 0.0;
        for (int i = 0; i < 4; ++i) drift = std::max(drift, rel(fine[i], coarse[i]));
        const bool bracket = coarse[0] >= 0.1 && coarse[1] <= 1.0 && fine[2] > 0.0 && fine[3] <= 1.0;
        // Table against direct evaluation, and the derivative against a central difference.
        double spot = 0.0;
        double fd = 0.0;
        for (double rho : {1e-7, 1e-5, 1e-3, 1e-1, 1.0}) {
            if (rho > top) continue;
            spot = std::max(spot, rel(tab.g(rho), g_eval(sym, rho)));
            const double h = 1e-3 * rho;
            const double d = (g_eval(sym, rho + h) - g_eval(sym, rho - h)) / (2 * h);
            fd = std::max(fd, rel(d, g_deriv(sym, rho, 1)));
        }
        ok = ok && drift <= 1e-3 && bracket && spot <= 1e-6 && fd <= 1e-4;
        detail += fmt("beta %.1f: c0 %.3g, G/m in [%.3f, %.3f], |G'|rho/m in [%.2e, %.3f], refine drift %.1e "
                      "(tol 1e-3), table-vs-direct %.1e, FD rel %.1e (tol 1e-4); ",
                      beta, tab.c0(), coarse[0], coarse[1], fine[2], fine[3], drift, spot, fd);
    }
    return {ok, detail};
}

// 4 ---------------------------------------------------------------------------
Outcome osgood_table() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
        MultiplierSymbol sym;
        const char* name;
        std::vector<Osgood> allowed;
    };
    const std::vector<Row> rows{
        {MultiplierSymbol::euler(), "euler", {Osgood::Holds}},
        {MultiplierSymbol::alpha_sqg(0.3), "alpha0.3", {Osgood::Fails}},
        {MultiplierSymbol::alpha_sqg(1.0), "alpha1", {Osgood::Fails}},
        {MultiplierSymbol::alpha_sqg(1.5), "alpha1.5", {Osgood::Fails}},
        {MultiplierSymbol::loglog_euler(0.5), "loglog0.5", {Osgood::Holds}},
        {MultiplierSymbol::loglog_euler(1.0), "loglog1", {Osgood::Holds, Osgood::Fails, Osgood::Undetermined}},
        {MultiplierSymbol::loglog_euler(1.5), "loglog1.5", {Osgood::Fails}},
        {MultiplierSymbol::log_euler(1.0), "log1", {Osgood::Fails}},
        {MultiplierSymbol::triple_log(), "triplelog", {Osgood::Holds}},
    };
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        const auto got = classify(r.sym).osgood;
        const bool hit = std::find(r.allowed.begin(), r.allowed.end(), got) != r.allowed.end();
        ok = ok && hit;
        detail += fmt("%s %s%s, ", r.name, to_string(got), hit ? "" : " (wrong)");
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok && s < 10.0, detail + fmt("%.1f s (limit 10 s)", s)};
}

// 5 ---------------------------------------------------------------------------
Outcome profile_roundtrips() {
    double worst = 0.0;
    for (const auto& sym : {MultiplierSymbol::euler(), MultiplierSymbol::loglog_euler(0.5),
                            MultiplierSymbol::triple_log(), MultiplierSymbol::alpha_sqg(0.5),
                            MultiplierSymbol::log_euler(1.0)}) {
        const OsgoodProfile p(sym);
        for (double r : logspace(2.5, 1e12, 25)) {
            const double h = p.h_eval(r);
            if (!(h < 0.9 * p.h_limit())) continue;
            worst = std::max(worst, rel(p.h_inv(h), r));
        }
        for (double r : logspace(1e-6, 1e12, 25)) {
            const double ht = p.ht_eval(r);
            if (ht < 0.9 * p.ht_limit()) worst = std::max(worst, rel(p.ht_inv(ht), r));
            const double hs = p.script_h(r);
            if (hs < 0.9 * p.script_h_limit()) worst = std::max(worst, rel(p.script_h_inv(hs), r));
        }
    }
    const OsgoodProfile e(MultiplierSymbol::euler());
    double closed = 0.0;
    for (double r : logspace(2.0, 1e100, 40)) {
        closed = std::max(closed, std::abs(e.h_eval(r) - (std::log(std::log(r)) - std::log(std::log(2.0)))));
    }
    return {worst <= 1e-8 && closed <= 1e-8,
            fmt("worst inverse roundtrip rel %.2e (tol 1e-8), Euler H closed form err %.2e (tol 1e-8)", worst, closed)};
}

// 6 ---------------------------------------------------------------------------
Outcome disk_steadiness() {
    bool ok = true;
    std::string detail;
    struct Case {
        const char* name;
        MultiplierSymbol sym;
    };
    for (const auto& c : {Case{"euler", MultiplierSymbol::euler()}, Case{"loglog1", MultiplierSymbol::loglog_euler(1.0)},
                          Case{"alpha0.5", MultiplierSymbol::alpha_sqg(0.5)}}) {
        const auto t0 = std::chrono::steady_clock::now();
        const KernelTable local = c.sym.family == Family::LogLogEuler ? KernelTable{} : KernelTable::build(c.sym, {});
        const KernelTable& tab = c.sym.family == Family::LogLogEuler ? loglog1_table() : local;
        SimulationState s;
        s.curves.push_back(patch(circle_nodes({0, 0}, 1.0, 256)));
        StepConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        double radial = 0.0;
        double area = 0.0;
        RunObserver obs;
        obs.on_diagnostics = [&](const SimulationState& st) {
            for (const auto& p : st.curves[0].nodes) radial = std::max(radial, std::abs(p.norm() - 1.0));
            area = std::max(area, rel(spectral_area(st.curves[0].nodes), kPi));
        };
        const auto res = run(s, tab, cfg, obs);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = !res.halted && res.state.t == 1.0 && radial <= 1e-4 && area <= 1e-6 && secs < 300.0;
        ok = ok && pass;
        detail += fmt("%s radial %.1e area %.1e %.0f s%s; ", c.name, radial, area, secs, res.halted ? " HALTED" : "");
    }
    return {ok, detail + "(tol radial 1e-4, area 1e-6, 300 s each)"};
}

// 7 ---------------------------------------------------------------------------
Outcome kirchhoff() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto tab = KernelTable::build(MultiplierSymbol::euler(), {});
    const double a = 1.0;
    const double b = 0.5;
    const auto ell = patch(ellipse_nodes({0, 0}, a, b, 0.0, 256));
    // Oracle rate from the linear interior field u = (-A y, B x) fitted to area quadrature.
    double fa = 0.0;
    double fb = 0.0;
    for (double f : {0.2, 0.4, 0.6}) {
        fa += -velocity_oracle({ell}, tab, {0.0, f * b}, 1024).x / (f * b) / 3.0;
        fb += velocity_oracle({ell}, tab, {f * a, 0.0}, 1024).y / (f * a) / 3.0;
    }
    const double omega_oracle = (fa * b * b - fb * a * a) / (b * b - a * a);
    StepConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 2.0;
    SimulationState s;
    s.curves.push_back(ell);
    const auto res = run(s, tab, cfg);
    const double omega = axis_angle(res.state.curves[0].nodes) / cfg.t_end;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double e_meas = rel(omega, 2.0 / 9.0);
    const double e_oracle = rel(omega_oracle, 2.0 / 9.0);
    return {!res.halted && e_meas <= 0.01 && e_oracle <= 0.01 && secs < 600.0,
            fmt("measured %.6f, quadrature oracle %.6f, 2/9 = %.6f, rel err %.1e / %.1e (tol 1e-2), %.0f s", omega,
                omega_oracle, 2.0 / 9.0, e_meas, e_oracle, secs)};
}

// 8 ---------------------------------------------------------------------------
Outcome oracle_equivalence() {
    const auto curve = patch(fourier_nodes({0, 0}, 1.0, {{3, 0.1, 0.0}, {2, 0.0, 0.05}}, 256));
    double worst = 0.0;
    std::string detail;
    for (const auto& sym : {MultiplierSymbol::euler(), MultiplierSymbol::alpha_sqg(0.5)}) {
        const auto tab = KernelTable::build(sym, {});
        const BiotSavart bs({curve}, tab);
        for (int i = 0; i < 10; ++i) {
            const double th = 2 * kPi * i / 10 + 0.1;
            const double r = 1.25 + 0.15 * i;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            const Vec2 u = bs.velocity(x);
            worst = std::max(worst, (velocity_oracle({curve}, tab, x, 2048) - u).norm() / u.norm());
        }
    }
    return {worst <= 1e-4, fmt("20 exterior points (euler, alpha 0.5): max rel %.2e (tol 1e-4)", worst)};
}

// 9 ---------------------------------------------------------------------------
Outcome symmetric_gradient() {
    const auto tab = KernelTable::build(MultiplierSymbol::alpha_sqg(0.5), {});
    const auto ell = patch(ellipse_nodes({0, 0}, 1.0, 0.5, 0.3, 256));
    const BiotSavart bs({ell}, tab);
    double trace = 0.0;
    double fd_err = 0.0;
    const double h = 1e-5;
    for (Vec2 x : {Vec2{0.2, 0.1}, Vec2{-0.4, 0.05}, Vec2{0.0, -0.2}, Vec2{0.5, 0.2}}) {
        const Mat2 g = bs.grad_u_sym(x);
        trace = std::max(trace, std::abs(g.trace()));
        const Vec2 dx = (bs.velocity(x + Vec2{h, 0}) - bs.velocity(x - Vec2{h, 0})) * (0.5 / h);
        const Vec2 dy = (bs.velocity(x + Vec2{0, h}) - bs.velocity(x - Vec2{0, h})) * (0.5 / h);
        const Mat2 s = Mat2{dx.x, dy.x, dx.y, dy.y}.sym_traceless();
        const Mat2 d{g.a11 - s.a11, g.a12 - s.a12, g.a21 - s.a21, g.a22 - s.a22};
        fd_err = std::max(fd_err, d.frobenius() / s.frobenius());
    }
    double center = 0.0;
    for (const auto& sym : {MultiplierSymbol::euler(), MultiplierSymbol::alpha_sqg(0.5)}) {
        const auto t = KernelTable::build(sym, {});
        const BiotSavart bd({patch(circle_nodes({0, 0}, 1.0, 256))}, t);
        center = std::max(center, bd.grad_u_sym({0, 0}).frobenius());
    }
    return {trace <= 1e-10 && fd_err <= 1e-5 && center <= 1e-6,
            fmt("trace %.1e (tol 1e-10), FD rel %.1e (tol 1e-5), disk centre %.1e (tol 1e-6)", trace, fd_err, center)};
}

// 10 --------------------------------------------------------------------------
Outcome holder_diagnostics() {
    const auto circle = circle_nodes({0, 0}, 1.0, 512);
    double holder = 0.0;
    for (double g : {0.25, 0.5, 0.75}) holder = std::max(holder, rel(holder_seminorm(circle, 1, g), std::pow(2.0, 1.0 - g)));
    // Circle closed form: S_rho is the arc {cos th < c} of the rho-circle.
    const double r = 0.9;
    const double rho = 0.5;
    const double c = (1.0 - r * r - rho * rho) / (2 * r * rho);
    const double expect = std::abs(kPi - 2 * std::acos(c));
    const auto fine = circle_nodes({0, 0}, 1.0, 4096);
    const double th = kPi / 4096.0;
    const double defect = geometric_defect(fine, Vec2{std::cos(th), std::sin(th)} * r, rho).defect;
    int probes = 0;
    int violations = 0;
    for (const auto& nodes : {circle_nodes({0, 0}, 1.0, 1024), ellipse_nodes({0, 0}, 1.0, 0.5, 0.0, 1024)}) {
        for (double g : {0.25, 0.5, 0.75}) {
            const double big_d = delta_gamma(nodes, g);
            const double dg = std::pow(big_d, -1.0 / g);
            for (double rf : {0.05, 0.2, 0.5, 1.0}) {
                for (std::size_t k = 0; k < nodes.size(); k += 128) {
                    const Vec2 inward = nodes[k] * (-1.0 / nodes[k].norm());
                    for (double f : {0.0, 0.1, 0.5}) {
                        const auto d = geometric_defect(nodes, nodes[k] + inward * (f * rf * dg), rf * dg);
                        ++probes;
                        if (d.defect > geometric_defect_bound(d.d_x, rf * dg, g, big_d)) ++violations;
                    }
                }
            }
        }
    }
    return {holder <= 0.01 && std::abs(defect - expect) <= 1e-3 && violations == 0,
            fmt("circle seminorm rel %.1e (tol 1e-2), defect %.6f vs %.6f (tol 1e-3), bound violations %d of %d",
                holder, defect, expect, violations, probes)};
}

// 11 --------------------------------------------------------------------------
Outcome two_patch() {
    const auto sym = MultiplierSymbol::euler();
    const auto tab = KernelTable::build(sym, {});
    const OsgoodProfile prof(sym);
    struct Result {
        EnvelopeCheck chk;
        double min_dist = 0.0;
        double area = 0.0;
        bool halted = false;
    };
    auto at = [&](int n) {
        SimulationState s;
        s.curves.push_back(patch(circle_nodes({-2.0, 0}, 1.0, n), 1.0, "a"));
        s.curves.push_back(patch(circle_nodes({2.0, 0}, 1.0, n), 1.0, "b"));
        StepConfig cfg;
        cfg.dt = 2e-2;
        cfg.t_end = 2.0;
        cfg.diagnostics_every = 5;
        std::vector<double> ts;
        std::vector<double> ds;
        Result out;
        out.min_dist = 1e300;
        RunObserver obs;
        obs.on_diagnostics = [&](const SimulationState& st) {
            ts.push_back(st.t);
            ds.push_back(min_inter_patch_distance(st.curves));
            out.min_dist = std::min(out.min_dist, ds.back());
            for (const auto& c : st.curves) out.area = std::max(out.area, rel(spectral_area(c.nodes), kPi));
        };
        out.halted = run(s, tab, cfg, obs).halted;
        out.chk = envelope_check(ts, ds, prof, EnvelopeKind::Separation);
        return out;
    };
    auto coarse = at(128);
    const auto fine = at(256);
    attach_refinement(coarse.chk, fine.chk);
    const double ratio = coarse.chk.refinement_ratio;
    const bool ok = !coarse.halted && !fine.halted && coarse.min_dist > 0.0 && fine.min_dist > 0.0 && coarse.chk.pass &&
                    fine.chk.pass && ratio >= 0.5 && ratio <= 2.0 && std::max(coarse.area, fine.area) <= 1e-6;
    return {ok, fmt("min dist %.4f / %.4f, C %.2e / %.2e, envelope %s, refinement ratio %.3f (range [0.5, 2]), "
                    "area drift %.1e (tol 1e-6)",
                    coarse.min_dist, fine.min_dist, coarse.chk.fitted_c, fine.chk.fitted_c,
                    coarse.chk.pass && fine.chk.pass ? "holds" : "violated", ratio, std::max(coarse.area, fine.area))};
}

// 12 --------------------------------------------------------------------------
Outcome self_convergence() {
    const auto tab = KernelTable::build(MultiplierSymbol::euler(), {});
    SimulationState init;
    init.curves.push_back(patch(fourier_nodes({0, 0}, 1.0, {{3, 0.1, 0.0}}, 96)));
    seed_tracers(init.curves, 12, init.tracers, init.tracer_weights);
    struct Hist {
        std::vector<std::vector<Vec2>> tracers;
        SimulationState last;
    };
    auto at = [&](double dt) {
        StepConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.8;
        cfg.reparam_every = 0;
        cfg.spacing_ratio_min = 0.0;
        cfg.diagnostics_every = static_cast<int>(std::lround(0.2 / dt));
        Hist h;
        RunObserver obs;
        obs.on_diagnostics = [&](const SimulationState& st) { h.tracers.push_back(st.tracers); };
        h.last = run(init, tab, cfg, obs).state;
        return h;
    };
    const auto a = at(0.1);
    const auto b = at(0.05);
    const auto c = at(0.025);
    const double d1 = flow_divergence(a.tracers, b.tracers, init.tracer_weights).back();
    const double d2 = flow_divergence(b.tracers, c.tracers, init.tracer_weights).back();
    const double order = std::log2(d1 / d2);
    const auto again = at(0.1);
    bool identical = again.last.tracers.size() == a.last.tracers.size();
    for (std::size_t i = 0; identical && i < a.last.tracers.size(); ++i) {
        identical = again.last.tracers[i].x == a.last.tracers[i].x && again.last.tracers[i].y == a.last.tracers[i].y;
    }
    for (std::size_t i = 0; identical && i < a.last.curves[0].nodes.size(); ++i) {
        identical = again.last.curves[0].nodes[i].x == a.last.curves[0].nodes[i].x &&
                    again.last.curves[0].nodes[i].y == a.last.curves[0].nodes[i].y;
    }
    return {order >= 3.0 && identical,
            fmt("divergence %.2e -> %.2e, order %.2f (min 3), rerun %s", d1, d2, order,
                identical ? "bit-identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    // Optional arguments select criteria by number.
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"euler_kernel_exact", euler_kernel},   {"alpha_power_law", alpha_power_law},
        {"loglog_asymptotics", loglog_asymptotics}, {"osgood_classification", osgood_table},
        {"profile_roundtrips", profile_roundtrips}, {"disk_steadiness", disk_steadiness},
        {"kirchhoff_ellipse", kirchhoff},        {"velocity_oracle", oracle_equivalence},
        {"symmetric_gradient", symmetric_gradient}, {"holder_diagnostics", holder_diagnostics},
        {"two_patch_run", two_patch},             {"self_convergence", self_convergence},
    };
    int failed = 0;
    int idx = 0;
    for (const auto& [name, fn] : criteria) {
        ++idx;
        if (!only.empty() && std::find(only.begin(), only.end(), idx) == only.end()) continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.c_str());
    }
    const std::size_t ran = only.empty() ? criteria.size() : only.size();
    std::printf("%d of %zu criteria passed\n", static_cast<int>(ran) - failed, ran);
    return failed == 0 ? 0 : 1;
}
