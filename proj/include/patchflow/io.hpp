#pragma once

// Run configuration, snapshots, CSV records, SVG rendering and atomic file writes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchflow/contour.hpp"
#include "patchflow/curve.hpp"
#include "patchflow/diagnostics.hpp"
#include "patchflow/error.hpp"
#include "patchflow/kernel.hpp"
#include "patchflow/multiplier.hpp"

namespace patchflow {

using nlohmann::json;

/// Shortest-roundtrip formatting is not guaranteed by printf, so numbers in
/// text outputs use 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes to a temporary sibling then renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses JSON text, reporting syntax errors with line and column.
inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(origin + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
    }
}

// RunConfig ---------------------------------------------------------------------

struct PatchSpec {
    std::string shape = "circle";
    std::string id;
    Vec2 center;
    double strength = 1.0;
    double radius = 1.0;
    double a = 1.0;
    double b = 1.0;
    double angle = 0.0;
    std::vector<FourierMode> modes;
    std::vector<Vec2> vertices;
};

struct OutputSettings {
    std::string directory = "out";
    bool csv = true;
    bool json_snapshots = true;
    bool svg = false;
    int snapshot_every = 100;
    std::vector<double> viewport;  // xmin, ymin, xmax, ymax; empty = from initial data
};

struct RunConfig {
    MultiplierSymbol symbol;
    std::vector<PatchSpec> patches;
    StepConfig step;
    int nodes = 256;
    DiagnosticSettings diagnostics;
    int diagnostics_cadence = 10;
    std::vector<Vec2> tracers;
    int tracers_per_patch = 0;
    KernelTableConfig kernel;
    OutputSettings output;
    json source;  // the normalized config echoed into run_meta.json
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, val] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

inline double num(const json& j, const char* key, double def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + "." + key + " must be finite");
    return v;
}

inline int integer(const json& j, const char* key, int def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

inline Vec2 vec(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + " must be a [x, y] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline void positive(double v, const std::string& name) {
    if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

}  // namespace detail

inline PatchSpec patch_from_json(const json& j, std::size_t index) {
    const std::string where = "patches[" + std::to_string(index) + "]";
    detail::check_keys(j, {"shape", "id", "center", "strength", "radius", "a", "b", "angle", "modes", "vertices"},
                       where);
    PatchSpec p;
    p.shape = j.value("shape", std::string("circle"));
    p.id = j.contains("id") ? j.at("id").get<std::string>() : "p" + std::to_string(index);
    if (j.contains("center")) p.center = detail::vec(j.at("center"), where + ".center");
    p.strength = detail::num(j, "strength", 1.0, where);
    if (p.strength == 0.0) throw ConfigError(where + ".strength must be nonzero");
    if (p.shape == "circle") {
        p.radius = detail::num(j, "radius", 1.0, where);
        detail::positive(p.radius, where + ".radius");
    } else if (p.shape == "ellipse") {
        p.a = detail::num(j, "a", 1.0, where);
        p.b = detail::num(j, "b", 1.0, where);
        p.angle = detail::num(j, "angle", 0.0, where);
        detail::positive(p.a, where + ".a");
        detail::positive(p.b, where + ".b");
    } else if (p.shape == "fourier") {
        p.radius = detail::num(j, "radius", 1.0, where);
        detail::positive(p.radius, where + ".radius");
        if (j.contains("modes")) {
            for (const auto& m : j.at("modes")) {
                detail::check_keys(m, {"k", "a", "b"}, where + ".modes[]");
                p.modes.push_back({detail::integer(m, "k", 1, where), detail::num(m, "a", 0.0, where),
                                   detail::num(m, "b", 0.0, where)});
            }
        }
    } else if (p.shape == "polygon") {
        if (!j.contains("vertices") || !j.at("vertices").is_array() || j.at("vertices").size() < 3) {
            throw ConfigError(where + ".vertices needs at least 3 points");
        }
        for (const auto& v : j.at("vertices")) p.vertices.push_back(detail::vec(v, where + ".vertices[]"));
    } else {
        throw ConfigError(where + ": unknown shape '" + p.shape + "'");
    }
    return p;
}

inline PatchCurve make_curve(const PatchSpec& p, int n) {
    PatchCurve c;
    c.id = p.id;
    c.strength = p.strength;
    if (p.shape == "circle") {
        c.nodes = circle_nodes(p.center, p.radius, n);
    } else if (p.shape == "ellipse") {
        c.nodes = ellipse_nodes(p.center, p.a, p.b, p.angle, n);
    } else if (p.shape == "fourier") {
        c.nodes = fourier_nodes(p.center, p.radius, p.modes, n);
    } else {
        c.nodes = polygon_nodes(p.vertices, n);
    }
    make_ccw(c);
    if (self_intersects(c.nodes)) throw ConfigError("patch " + p.id + " is not a simple curve");
    return c;
}

inline RunConfig config_from_json(const json& j) {
    try {
        detail::check_keys(j, {"multiplier", "patches", "solver", "diagnostics", "kernel", "output"}, "config");
        RunConfig cfg;
        if (!j.contains("multiplier")) throw ConfigError("config needs a \"multiplier\"");
        cfg.symbol = symbol_from_json(j.at("multiplier"));
        if (!j.contains("patches") || !j.at("patches").is_array() || j.at("patches").empty()) {
            throw ConfigError("config needs a nonempty \"patches\" array");
        }
        for (std::size_t i = 0; i < j.at("patches").size(); ++i) cfg.patches.push_back(patch_from_json(j.at("patches")[i], i));

        const json solver = j.value("solver", json::object());
        detail::check_keys(solver, {"dt", "t_end", "target_nodes", "reparam_every", "quad_window", "contact_factor"},
                           "solver");
        cfg.step.dt = detail::num(solver, "dt", 1e-3, "solver");
        cfg.step.t_end = detail::num(solver, "t_end", 1.0, "solver");
        cfg.nodes = detail::integer(solver, "target_nodes", 256, "solver");
        cfg.step.reparam_every = detail::integer(solver, "reparam_every", 20, "solver");
        cfg.step.quadrature.quad_window = detail::num(solver, "quad_window", 0.0, "solver");
        cfg.step.contact_factor = detail::num(solver, "contact_factor", 5.0, "solver");
        if (solver.contains("quad_window") && !(cfg.step.quadrature.quad_window > 0.0)) {
            throw ConfigError("solver.quad_window must lie in (0, pi/4]");
        }
        cfg.step.target_nodes.assign(cfg.patches.size(), cfg.nodes);

        const json diag = j.value("diagnostics", json::object());
        detail::check_keys(diag, {"cadence", "gamma_list", "max_k", "tracers", "tracer_pairs", "tracers_per_patch"},
                           "diagnostics");
        cfg.diagnostics_cadence = detail::integer(diag, "cadence", 10, "diagnostics");
        if (diag.contains("gamma_list")) cfg.diagnostics.gammas = diag.at("gamma_list").get<std::vector<double>>();
        cfg.diagnostics.max_k = detail::integer(diag, "max_k", 1, "diagnostics");
        if (diag.contains("tracers")) {
            for (const auto& v : diag.at("tracers")) cfg.tracers.push_back(detail::vec(v, "diagnostics.tracers[]"));
        }
        cfg.tracers_per_patch = detail::integer(diag, "tracers_per_patch", 0, "diagnostics");
        if (cfg.tracers_per_patch < 0) throw ConfigError("diagnostics.tracers_per_patch must be >= 0");
        if (diag.contains("tracer_pairs")) {
            for (const auto& p : diag.at("tracer_pairs")) {
                if (!p.is_array() || p.size() != 2) throw ConfigError("tracer_pairs entries must be [i, j]");
                cfg.diagnostics.tracer_pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
            }
        }
        cfg.step.diagnostics_every = cfg.diagnostics_cadence;

        const json kern = j.value("kernel", json::object());
        detail::check_keys(kern, {"rho_min", "rho_max", "tol"}, "kernel");
        cfg.kernel.rho_min = detail::num(kern, "rho_min", 1e-8, "kernel");
        cfg.kernel.rho_max = detail::num(kern, "rho_max", 1e3, "kernel");
        cfg.kernel.tol = detail::num(kern, "tol", 1e-8, "kernel");
        detail::positive(cfg.kernel.rho_min, "kernel.rho_min");
        if (!(cfg.kernel.rho_max > 10.0 * cfg.kernel.rho_min)) throw ConfigError("kernel.rho_max must exceed 10 rho_min");
        if (!(cfg.kernel.tol > 0.0 && cfg.kernel.tol <= 1e-4)) throw ConfigError("kernel.tol must lie in (0, 1e-4]");

        const json out = j.value("output", json::object());
        detail::check_keys(out, {"directory", "formats", "snapshot_every", "viewport"}, "output");
        cfg.output.directory = out.value("directory", std::string("out"));
        if (out.contains("formats")) {
            cfg.output.csv = cfg.output.json_snapshots = cfg.output.svg = false;
            for (const auto& f : out.at("formats")) {
                const auto s = f.get<std::string>();
                if (s == "csv") {
                    cfg.output.csv = true;
                } else if (s == "json") {
                    cfg.output.json_snapshots = true;
                } else if (s == "svg") {
                    cfg.output.svg = true;
                } else {
                    throw ConfigError("unknown output format '" + s + "'");
                }
            }
        }
        cfg.output.snapshot_every = detail::integer(out, "snapshot_every", 100, "output");
        if (out.contains("viewport")) {
            cfg.output.viewport = out.at("viewport").get<std::vector<double>>();
            if (cfg.output.viewport.size() != 4 || !(cfg.output.viewport[2] > cfg.output.viewport[0]) ||
                !(cfg.output.viewport[3] > cfg.output.viewport[1])) {
                throw ConfigError("output.viewport must be [xmin, ymin, xmax, ymax]");
            }
        }
        cfg.step.snapshot_every = cfg.output.snapshot_every;
        cfg.step.validate();
        cfg.diagnostics.validate();
        cfg.source = j;
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

/// Deterministic tracer seeds: the first k grid points inside each patch, on a
/// square grid over its bounding box, row by row.
inline void seed_tracers(const std::vector<PatchCurve>& curves, int per_patch, std::vector<Vec2>& pts,
                         std::vector<double>& weights) {
    for (const auto& c : curves) {
        if (per_patch <= 0) break;
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto& p : c.nodes) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const double area = std::abs(polygon_area(c.nodes));
        const int side = static_cast<int>(std::ceil(std::sqrt(2.0 * per_patch * (x1 - x0) * (y1 - y0) / area))) + 1;
        int added = 0;
        for (int iy = 0; iy < side && added < per_patch; ++iy) {
            for (int ix = 0; ix < side && added < per_patch; ++ix) {
                const Vec2 p{x0 + (ix + 0.5) * (x1 - x0) / side, y0 + (iy + 0.5) * (y1 - y0) / side};
                if (inside_polygon(c.nodes, p) && project_to_polygon(c.nodes, p).distance > 0.05 * (x1 - x0) / side) {
                    pts.push_back(p);
                    weights.push_back(std::abs(c.strength));
                    ++added;
                }
            }
        }
    }
}

/// Initial state from a config. Throws ConfigError if patches overlap or sit
/// closer than 10 node spacings.
inline SimulationState initial_state(const RunConfig& cfg) {
    SimulationState s;
    for (const auto& p : cfg.patches) s.curves.push_back(make_curve(p, cfg.nodes));
    double max_spacing = 0.0;
    for (const auto& c : s.curves) max_spacing = std::max(max_spacing, node_spacing_range(c.nodes).second);
    for (std::size_t i = 0; i < s.curves.size(); ++i) {
        for (std::size_t j = i + 1; j < s.curves.size(); ++j) {
            const double d = min_inter_patch_distance({s.curves[i], s.curves[j]});
            const bool nested = inside_polygon(s.curves[j].nodes, s.curves[i].nodes[0]) ||
                                inside_polygon(s.curves[i].nodes, s.curves[j].nodes[0]);
            if (nested || d < 10.0 * max_spacing) {
                throw ConfigError("patches " + s.curves[i].id + " and " + s.curves[j].id +
                                  " overlap or are closer than 10 node spacings");
            }
        }
    }
    s.tracers = cfg.tracers;
    for (const auto& t : cfg.tracers) {
        double w = 0.0;
        for (const auto& c : s.curves) {
            if (inside_polygon(c.nodes, t)) w = std::abs(c.strength);
        }
        s.tracer_weights.push_back(w);
    }
    seed_tracers(s.curves, cfg.tracers_per_patch, s.tracers, s.tracer_weights);
    for (const auto& [a, b] : cfg.diagnostics.tracer_pairs) {
        if (a >= s.tracers.size() || b >= s.tracers.size()) throw ConfigError("tracer pair index out of range");
    }
    return s;
}

// Snapshots ---------------------------------------------------------------------

inline json snapshot_to_json(const SimulationState& s, const MultiplierSymbol& sym,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs = {}) {
    json j;
    j["t"] = s.t;
    j["step"] = s.step;
    j["multiplier"] = symbol_to_json(sym);
    j["patches"] = json::array();
    for (const auto& c : s.curves) {
        json p;
        p["id"] = c.id;
        p["strength"] = c.strength;
        p["nodes"] = json::array();
        for (const auto& v : c.nodes) p["nodes"].push_back({v.x, v.y});
        j["patches"].push_back(p);
    }
    j["tracers"] = json::array();
    for (const auto& v : s.tracers) j["tracers"].push_back({v.x, v.y});
    j["tracer_weights"] = s.tracer_weights;
    j["tracer_pairs"] = json::array();
    for (const auto& [a, b] : pairs) j["tracer_pairs"].push_back({a, b});
    return j;
}

struct Snapshot {
    SimulationState state;
    MultiplierSymbol symbol;
    std::vector<std::pair<std::size_t, std::size_t>> tracer_pairs;
};

inline Snapshot snapshot_from_json(const json& j) {
    try {
        Snapshot snap;
        snap.state.t = j.at("t").get<double>();
        snap.state.step = j.value("step", 0L);
        if (j.contains("multiplier")) snap.symbol = symbol_from_json(j.at("multiplier"));
        for (const auto& p : j.at("patches")) {
            PatchCurve c;
            c.id = p.value("id", std::string());
            c.strength = p.value("strength", 1.0);
            for (const auto& v : p.at("nodes")) c.nodes.push_back(detail::vec(v, "snapshot node"));
            snap.state.curves.push_back(std::move(c));
        }
        if (j.contains("tracers")) {
            for (const auto& v : j.at("tracers")) snap.state.tracers.push_back(detail::vec(v, "snapshot tracer"));
        }
        if (j.contains("tracer_weights")) snap.state.tracer_weights = j.at("tracer_weights").get<std::vector<double>>();
        if (j.contains("tracer_pairs")) {
            for (const auto& p : j.at("tracer_pairs")) snap.tracer_pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
        }
        return snap;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("snapshot: ") + e.what());
    }
}

// Diagnostics CSV -----------------------------------------------------------------

inline std::string gamma_tag(double g) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

inline std::string diagnostics_header(const DiagnosticSettings& ds) {
    std::string h = "t,patch_id,area,perimeter,w_inf";
    for (int k = 1; k <= ds.max_k; ++k) {
        for (double g : ds.gammas) h += ",holder_k" + std::to_string(k) + "_g" + gamma_tag(g);
    }
    for (double g : ds.gammas) h += ",delta_g" + gamma_tag(g);
    h += ",min_dist";
    for (const auto& [a, b] : ds.tracer_pairs) h += ",pair_" + std::to_string(a) + "_" + std::to_string(b);
    return h + ",max_curvature\n";
}

/// One row per patch.
inline std::string diagnostics_rows(const DiagnosticRecord& rec, const DiagnosticSettings& ds) {
    std::string out;
    for (const auto& p : rec.patches) {
        out += fmt17(rec.t) + "," + p.id + "," + fmt17(p.area) + "," + fmt17(p.perimeter) + "," + fmt17(p.w_inf);
        for (int k = 1; k <= ds.max_k; ++k) {
            for (double g : ds.gammas) out += "," + fmt17(p.holder.at({k, g}));
        }
        for (double g : ds.gammas) out += "," + fmt17(p.delta_gamma.at(g));
        out += "," + (std::isfinite(rec.min_dist) ? fmt17(rec.min_dist) : std::string("inf"));
        for (double s : rec.tracer_pair_sep) out += "," + fmt17(s);
        out += "," + fmt17(p.max_curvature) + "\n";
    }
    return out;
}

// SVG -------------------------------------------------------------------------------

inline std::vector<double> default_viewport(const std::vector<PatchCurve>& curves) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& c : curves) {
        for (const auto& p : c.nodes) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    const double pad = 0.25 * std::max(x1 - x0, y1 - y0);
    return {x0 - pad, y0 - pad, x1 + pad, y1 + pad};
}

inline std::string render_svg(const SimulationState& s, const std::vector<double>& vp) {
    const double w = vp[2] - vp[0];
    const double h = vp[3] - vp[1];
    const double px = 600.0;
    const double scale = px / std::max(w, h);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * scale << "\" height=\"" << h * scale << "\">\n";
    o << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">t = " << s.t << "</text>\n";
    for (const auto& c : s.curves) {
        o << "<polygon fill=\"" << (c.strength > 0 ? "#d9534f" : "#337ab7") << "\" fill-opacity=\"0.35\" stroke=\"black\" "
          << "stroke-width=\"1\" points=\"";
        for (const auto& p : c.nodes) o << (p.x - vp[0]) * scale << "," << (vp[3] - p.y) * scale << " ";
        o << "\"/>\n";
    }
    for (const auto& p : s.tracers) {
        o << "<circle r=\"2\" fill=\"black\" cx=\"" << (p.x - vp[0]) * scale << "\" cy=\"" << (vp[3] - p.y) * scale
          << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// Kernel table CSV --------------------------------------------------------------------

inline json kernel_table_meta(const KernelTable& tab) {
    json m;
    m["symbol"] = symbol_to_json(tab.symbol());
    m["rho_min"] = tab.config().rho_min;
    m["rho_max"] = tab.config().rho_max;
    m["tol"] = tab.config().tol;
    m["points"] = tab.size();
    m["per_decade"] = tab.per_decade();
    m["max_midpoint_error"] = tab.max_midpoint_error();
    m["c0"] = tab.c0();
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(tab.hash()));
    m["hash"] = hash;
    return m;
}

inline std::string kernel_table_csv(const KernelTable& tab) {
    std::string out = "# " + kernel_table_meta(tab).dump() + "\nrho,G,G1,G2,Rtilde\n";
    for (std::size_t i = 0; i < tab.size(); ++i) {
        out += fmt17(tab.rho_at(i)) + "," + fmt17(tab.g_values()[i]) + "," + fmt17(tab.g1_values()[i]) + "," +
               fmt17(tab.g2_values()[i]) + "," + fmt17(tab.rtilde_values()[i]) + "\n";
    }
    return out;
}

}  // namespace patchflow
