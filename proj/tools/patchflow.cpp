#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patchflow/patchflow.hpp"

using namespace patchflow;

namespace {

/// A family name ("euler"), inline JSON ('{"family": ...}') or a path to a JSON file.
MultiplierSymbol parse_symbol_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return symbol_from_json(parse_json(arg, "symbol"));
    if (std::filesystem::exists(arg)) {
        const json j = parse_json(read_file(arg), arg);
        return symbol_from_json(j.contains("multiplier") ? j.at("multiplier") : j);
    }
    return symbol_from_json(json{{"family", arg}});
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_atomic(path, text);
    }
}

int cmd_simulate(const std::string& config_path) {
    const RunConfig cfg = config_from_json(parse_json(read_file(config_path), config_path));
    const SimulateResult res = simulate(cfg);
    if (res.exit_code != 0) std::cerr << "solver halt: " << res.message << "\n";
    std::cerr << "t = " << res.final_state.t << ", snapshots " << res.snapshots << ", output in "
              << cfg.output.directory << "\n";
    return res.exit_code;
}

int cmd_classify(const std::string& symbol) {
    const auto rep = classify(parse_symbol_arg(symbol));
    std::cout << report_to_json(rep).dump(2) << "\n";
    return 0;
}

int cmd_kernel_table(const std::string& symbol, const KernelTableConfig& kc, const std::string& out) {
    const auto tab = KernelTable::build(parse_symbol_arg(symbol), kc);
    emit(kernel_table_csv(tab), out);
    return 0;
}

struct EnvelopeArgs {
    std::string mode = "profile";
    double c = 1.0;
    double sep0 = 0.1;
    double t_end = 1.0;
    int samples = 101;
    double r_min = 2.0;
    double r_max = 1e12;
    double r0 = 0.0;
};

int cmd_envelope(const std::string& symbol, const EnvelopeArgs& a, const std::string& out) {
    const OsgoodProfile prof(parse_symbol_arg(symbol), a.r0);
    if (a.samples < 2) throw ConfigError("--samples must be >= 2");
    std::string csv;
    if (a.mode == "profile") {
        if (!(a.r_min > 0.0 && a.r_max > a.r_min)) throw ConfigError("need 0 < r-min < r-max");
        csv = "r,H,Ht,Hs,M\n";
        for (int i = 0; i < a.samples; ++i) {
            const double r = a.r_min * std::pow(a.r_max / a.r_min, static_cast<double>(i) / (a.samples - 1));
            csv += fmt17(r) + "," + fmt17(prof.h_eval(r)) + "," + fmt17(prof.ht_eval(r)) + "," +
                   fmt17(prof.script_h(r)) + "," + fmt17(prof.script_m(r)) + "\n";
        }
    } else if (a.mode == "flow" || a.mode == "separation") {
        csv = "t,lower,upper,horizon,past_horizon\n";
        for (int i = 0; i < a.samples; ++i) {
            const double t = a.t_end * static_cast<double>(i) / (a.samples - 1);
            const auto b = a.mode == "flow" ? prof.envelope_flow_bound(a.sep0, t, a.c)
                                            : prof.envelope_separation(a.sep0, t, a.c);
            const double upper = a.mode == "flow" ? b.upper : std::numeric_limits<double>::infinity();
            csv += fmt17(t) + "," + fmt17(b.lower) + "," + fmt17(upper) + "," + fmt17(b.horizon) + "," +
                   (b.past_horizon ? "1" : "0") + "\n";
        }
    } else {
        throw ConfigError("--mode must be profile, flow or separation");
    }
    emit(csv, out);
    return 0;
}

int cmd_diagnose(const std::string& path, const std::vector<double>& gammas, int max_k, const std::string& out) {
    const Snapshot snap = snapshot_from_json(parse_json(read_file(path), path));
    DiagnosticSettings ds;
    ds.gammas = gammas;
    ds.max_k = max_k;
    ds.tracer_pairs = snap.tracer_pairs;
    ds.validate();
    const auto rec = compute_record(snap.state.t, snap.state.curves, snap.state.tracers, ds);
    emit(diagnostics_header(ds) + diagnostics_rows(rec, ds), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchflow: contour dynamics and diagnostics for active scalar patches"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "run a simulation from a JSON config");
    sim->add_option("config", config_path, "config file")->required();

    std::string symbol;
    auto* cls = app.add_subcommand("classify", "hypothesis report for a multiplier symbol (JSON)");
    cls->add_option("symbol", symbol, "family name, inline JSON or JSON file")->required();

    KernelTableConfig kc;
    std::string out;
    auto* kt = app.add_subcommand("kernel-table", "tabulate G, G', G'', Rtilde as CSV");
    kt->add_option("symbol", symbol, "family name, inline JSON or JSON file")->required();
    kt->add_option("--rho-min", kc.rho_min, "smallest tabulated rho")->capture_default_str();
    kt->add_option("--rho-max", kc.rho_max, "largest tabulated rho")->capture_default_str();
    kt->add_option("--tol", kc.tol, "interpolation tolerance")->capture_default_str();
    kt->add_option("-o,--output", out, "output file (default stdout)");

    EnvelopeArgs ea;
    auto* env = app.add_subcommand("envelope", "Osgood profiles or envelope curves as CSV");
    env->add_option("symbol", symbol, "family name, inline JSON or JSON file")->required();
    env->add_option("--mode", ea.mode, "profile | flow | separation")->capture_default_str();
    env->add_option("--C", ea.c, "envelope constant")->capture_default_str();
    env->add_option("--sep0", ea.sep0, "initial separation (flow) or distance d0 (separation)")->capture_default_str();
    env->add_option("--t-end", ea.t_end, "final time")->capture_default_str();
    env->add_option("--samples", ea.samples, "number of rows")->capture_default_str();
    env->add_option("--r-min", ea.r_min, "profile range start")->capture_default_str();
    env->add_option("--r-max", ea.r_max, "profile range end")->capture_default_str();
    env->add_option("--r0", ea.r0, "convexity threshold (0 = automatic)")->capture_default_str();
    env->add_option("-o,--output", out, "output file (default stdout)");

    std::string snapshot;
    std::vector<double> gammas{0.5};
    int max_k = 1;
    auto* dia = app.add_subcommand("diagnose", "diagnostic row(s) for a snapshot as CSV");
    dia->add_option("snapshot", snapshot, "snapshot JSON")->required();
    dia->add_option("--gamma", gammas, "Hoelder exponents")->delimiter(',')->capture_default_str();
    dia->add_option("--max-k", max_k, "highest derivative order")->capture_default_str();
    dia->add_option("-o,--output", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path);
        if (cls->parsed()) return cmd_classify(symbol);
        if (kt->parsed()) return cmd_kernel_table(symbol, kc, out);
        if (env->parsed()) return cmd_envelope(symbol, ea, out);
        if (dia->parsed()) return cmd_diagnose(snapshot, gammas, max_k, out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SolverHalt& e) {
        std::cerr << "solver halt: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << " (limit " << e.limit() << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
