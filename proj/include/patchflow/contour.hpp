#pragma once

// Contour dynamics: fixed-step RK4 on the boundary nodes (and passive tracers)
// with velocities from the boundary-integral evaluator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "patchflow/biot_savart.hpp"
#include "patchflow/curve.hpp"
#include "patchflow/error.hpp"
#include "patchflow/kernel.hpp"

namespace patchflow {

struct SimulationState {
    std::vector<PatchCurve> curves;
    std::vector<Vec2> tracers;
    std::vector<double> tracer_weights;  // |a_j| of the seeding patch, used by flow_divergence
    double t = 0.0;
    long step = 0;
};

struct StepConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int reparam_every = 20;  // 0 disables redistribution
    std::vector<int> target_nodes;  // per curve; empty keeps the current counts
    QuadratureSettings quadrature;
    int snapshot_every = 100;
    int diagnostics_every = 10;
    double contact_factor = 5.0;
    double spacing_ratio_min = 0.1;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
        if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
        if (reparam_every < 0) throw ConfigError("reparam_every must be >= 0");
        for (int n : target_nodes) {
            if (n < 64) throw ConfigError("target_nodes must be >= 64");
        }
        if (snapshot_every < 1 || diagnostics_every < 1) throw ConfigError("cadences must be >= 1");
        quadrature.validate();
    }
};

/// Smallest node-to-segment distance between distinct curves (+inf for one curve).
inline double min_inter_patch_distance(const std::vector<PatchCurve>& curves) {
    double best = std::numeric_limits<double>::infinity();
    auto seg_dist = [](Vec2 p, Vec2 a, Vec2 b) {
        const Vec2 ab = b - a;
        const double l2 = ab.norm2();
        const double s = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
        return (p - (a + ab * s)).norm();
    };
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = 0; j < curves.size(); ++j) {
            if (i == j) continue;
            const auto& p = curves[i].nodes;
            const auto& q = curves[j].nodes;
            for (const auto& x : p) {
                for (std::size_t k = 0; k < q.size(); ++k) best = std::min(best, seg_dist(x, q[k], q[(k + 1) % q.size()]));
            }
        }
    }
    return best;
}

/// Throws SolverHalt when a curve self-intersects, flips orientation, or comes
/// closer to another curve than contact_factor times the largest node spacing.
inline void validate_state(const SimulationState& s, double contact_factor) {
    double max_spacing = 0.0;
    for (const auto& c : s.curves) {
        for (const auto& p : c.nodes) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw SolverHalt("non-finite node in patch " + c.id);
        }
        if (polygon_area(c.nodes) <= 0.0) throw SolverHalt("orientation flip in patch " + c.id);
        if (self_intersects(c.nodes)) throw SolverHalt("self-intersection in patch " + c.id);
        max_spacing = std::max(max_spacing, node_spacing_range(c.nodes).second);
    }
    if (s.curves.size() > 1) {
        const double d = min_inter_patch_distance(s.curves);
        if (d < contact_factor * max_spacing) {
            throw SolverHalt("inter-patch contact: distance " + std::to_string(d) + " below " +
                             std::to_string(contact_factor) + " x max spacing");
        }
    }
}

/// One classical RK4 step of nodes and tracers.
inline SimulationState rk4_step(const SimulationState& s, const KernelTable& table, const QuadratureSettings& qs,
                                double dt) {
    struct Rates {
        std::vector<std::vector<Vec2>> nodes;
        std::vector<Vec2> tracers;
    };
    auto rates = [&](const std::vector<PatchCurve>& curves, const std::vector<Vec2>& tracers) {
        const BiotSavart bs(curves, table, qs);
        return Rates{bs.velocity_nodes(), bs.velocity_points(tracers)};
    };
    auto advance = [&](const Rates& k, double h, std::vector<PatchCurve>& curves, std::vector<Vec2>& tracers) {
        curves = s.curves;
        tracers = s.tracers;
        for (std::size_t c = 0; c < curves.size(); ++c) {
            for (std::size_t i = 0; i < curves[c].nodes.size(); ++i) curves[c].nodes[i] += k.nodes[c][i] * h;
        }
        for (std::size_t i = 0; i < tracers.size(); ++i) tracers[i] += k.tracers[i] * h;
    };

    std::vector<PatchCurve> cs;
    std::vector<Vec2> ts;
    const Rates k1 = rates(s.curves, s.tracers);
    advance(k1, 0.5 * dt, cs, ts);
    const Rates k2 = rates(cs, ts);
    advance(k2, 0.5 * dt, cs, ts);
    const Rates k3 = rates(cs, ts);
    advance(k3, dt, cs, ts);
    const Rates k4 = rates(cs, ts);

    SimulationState out = s;
    const double w = dt / 6.0;
    for (std::size_t c = 0; c < out.curves.size(); ++c) {
        for (std::size_t i = 0; i < out.curves[c].nodes.size(); ++i) {
            out.curves[c].nodes[i] +=
                (k1.nodes[c][i] + k2.nodes[c][i] * 2.0 + k3.nodes[c][i] * 2.0 + k4.nodes[c][i]) * w;
        }
    }
    for (std::size_t i = 0; i < out.tracers.size(); ++i) {
        out.tracers[i] += (k1.tracers[i] + k2.tracers[i] * 2.0 + k3.tracers[i] * 2.0 + k4.tracers[i]) * w;
    }
    out.t = s.t + dt;
    out.step = s.step + 1;
    return out;
}

/// step: RK4 followed by invariant revalidation.
inline SimulationState step(const SimulationState& s, const KernelTable& table, const StepConfig& cfg) {
    SimulationState out = rk4_step(s, table, cfg.quadrature, cfg.dt);
    validate_state(out, cfg.contact_factor);
    return out;
}

/// Redistributes every curve to uniform arc length (target counts from cfg).
inline void reparameterize_all(SimulationState& s, const StepConfig& cfg) {
    for (std::size_t c = 0; c < s.curves.size(); ++c) {
        const int n = c < cfg.target_nodes.size() ? cfg.target_nodes[c] : static_cast<int>(s.curves[c].nodes.size());
        s.curves[c].nodes = reparameterize(s.curves[c].nodes, n);
    }
}

struct RunResult {
    SimulationState state;
    bool halted = false;
    std::string message;
};

/// Observer callbacks; each receives the current state.
struct RunObserver {
    std::function<void(const SimulationState&)> on_diagnostics;
    std::function<void(const SimulationState&)> on_snapshot;
};

/// Steps to t_end. Diagnostics and snapshots are emitted at step 0, at their
/// cadences, and at the final step. Redistribution happens every reparam_every
/// steps or when the spacing ratio drops below spacing_ratio_min.
inline RunResult run(SimulationState s, const KernelTable& table, const StepConfig& cfg, const RunObserver& obs = {}) {
    cfg.validate();
    for (auto& c : s.curves) make_ccw(c);
    if (!cfg.target_nodes.empty()) reparameterize_all(s, cfg);
    RunResult res;
    try {
        validate_state(s, cfg.contact_factor);
    } catch (const SolverHalt& e) {
        res.state = s;
        res.halted = true;
        res.message = e.what();
        return res;
    }
    const long total = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
    const double t0 = s.t;
    auto emit = [&](bool last) {
        if (obs.on_diagnostics && (s.step % cfg.diagnostics_every == 0 || last)) obs.on_diagnostics(s);
        if (obs.on_snapshot && (s.step % cfg.snapshot_every == 0 || last)) obs.on_snapshot(s);
    };
    const long first = s.step;
    emit(total == 0);
    for (long n = 1; n <= total; ++n) {
        try {
            s = rk4_step(s, table, cfg.quadrature, cfg.dt);
            s.t = t0 + static_cast<double>(n) * cfg.dt;
            validate_state(s, cfg.contact_factor);
        } catch (const SolverHalt& e) {
            res.halted = true;
            res.message = e.what();
            if (obs.on_snapshot) obs.on_snapshot(s);
            res.state = std::move(s);
            return res;
        }
        bool redistribute = cfg.reparam_every > 0 && (s.step - first) % cfg.reparam_every == 0;
        for (const auto& c : s.curves) {
            const auto sp = node_spacing_range(c.nodes);
            if (sp.first < cfg.spacing_ratio_min * sp.second) redistribute = true;
        }
        if (redistribute) reparameterize_all(s, cfg);
        emit(n == total);
    }
    res.state = std::move(s);
    return res;
}

}  // namespace patchflow
