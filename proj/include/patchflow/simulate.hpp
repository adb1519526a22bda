#pragma once

// The simulate driver: config -> kernel table -> run -> artifacts.

#include <cstdio>
#include <filesystem>
#include <string>

#include "patchflow/contour.hpp"
#include "patchflow/diagnostics.hpp"
#include "patchflow/io.hpp"
#include "patchflow/kernel.hpp"

#ifndef PATCHFLOW_VERSION
#define PATCHFLOW_VERSION "0.1.0"
#endif

namespace patchflow {

struct SimulateResult {
    int exit_code = 0;
    std::string message;
    SimulationState final_state;
    int snapshots = 0;
};

/// Runs a parsed config and writes diagnostics.csv, snapshots/NNNN.{json,svg}
/// and run_meta.json into cfg.output.directory. Exit code 0 on success, 2 on a
/// solver halt (artifacts up to the halt are kept).
inline SimulateResult simulate(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.output.directory;
    fs::create_directories(dir / "snapshots");

    const KernelTable table = KernelTable::build(cfg.symbol, cfg.kernel);
    SimulationState s0 = initial_state(cfg);
    const auto viewport = cfg.output.viewport.empty() ? default_viewport(s0.curves) : cfg.output.viewport;

    SimulateResult res;
    std::string csv = diagnostics_header(cfg.diagnostics);
    auto flush_csv = [&] {
        if (cfg.output.csv) write_atomic(dir / "diagnostics.csv", csv);
    };
    RunObserver obs;
    obs.on_diagnostics = [&](const SimulationState& s) {
        csv += diagnostics_rows(compute_record(s.t, s.curves, s.tracers, cfg.diagnostics), cfg.diagnostics);
        flush_csv();
    };
    obs.on_snapshot = [&](const SimulationState& s) {
        char name[32];
        std::snprintf(name, sizeof name, "%04d", res.snapshots++);
        if (cfg.output.json_snapshots) {
            write_atomic(dir / "snapshots" / (std::string(name) + ".json"),
                         snapshot_to_json(s, cfg.symbol, cfg.diagnostics.tracer_pairs).dump(1) + "\n");
        }
        if (cfg.output.svg) write_atomic(dir / "snapshots" / (std::string(name) + ".svg"), render_svg(s, viewport));
    };

    const RunResult run_res = run(std::move(s0), table, cfg.step, obs);
    flush_csv();
    res.exit_code = run_res.halted ? 2 : 0;
    res.message = run_res.message;
    res.final_state = run_res.state;

    json meta;
    meta["version"] = PATCHFLOW_VERSION;
    meta["config"] = cfg.source;
    meta["kernel_table"] = kernel_table_meta(table);
    meta["status"] = run_res.halted ? "halted" : "ok";
    meta["message"] = run_res.message;
    meta["t_final"] = run_res.state.t;
    meta["steps"] = run_res.state.step;
    meta["snapshots"] = res.snapshots;
    meta["tracer_count"] = run_res.state.tracers.size();
    write_atomic(dir / "run_meta.json", meta.dump(2) + "\n");
    return res;
}

}  // namespace patchflow
