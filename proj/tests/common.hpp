#pragma once

#include <map>
#include <memory>
#include <string>

#include "patchflow/patchflow.hpp"

namespace pftest {

/// Kernel tables are expensive for slowly varying symbols; build each once per binary.
inline const patchflow::KernelTable& table_for(const patchflow::MultiplierSymbol& sym,
                                               const patchflow::KernelTableConfig& cfg = {}) {
    static std::map<std::string, std::unique_ptr<patchflow::KernelTable>> cache;
    const std::string key = patchflow::symbol_to_json(sym).dump() + "|" + std::to_string(cfg.rho_min) + "|" +
                            std::to_string(cfg.rho_max) + "|" + std::to_string(cfg.tol);
    auto& slot = cache[key];
    if (!slot) slot = std::make_unique<patchflow::KernelTable>(patchflow::KernelTable::build(sym, cfg));
    return *slot;
}

inline patchflow::PatchCurve make_patch(std::vector<patchflow::Vec2> nodes, double strength = 1.0,
                                        std::string id = "p0") {
    patchflow::PatchCurve c;
    c.nodes = std::move(nodes);
    c.strength = strength;
    c.id = std::move(id);
    return c;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace pftest
