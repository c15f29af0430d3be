#pragma once

#include "config.hpp"
#include "geometry.hpp"
#include "measures.hpp"
#include "record.hpp"
#include "schottky.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace escapelab {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides dynamics.seed
  int threads = 0;
};

// Subcommands that compute from a config; "report" reads a stored record instead.
const std::vector<std::string>& experiment_commands();
bool is_experiment(const std::string& command);

ModelGeometry geometry_from_config(const ExperimentConfig& cfg);
SchottkyGroup group_from_config(const ExperimentConfig& cfg);
// prefix is "measures" or "semiclassics".
SymbolFunction symbol_from_config(const ExperimentConfig& cfg, const std::string& prefix);

// Throws the module errors unchanged; the record carries no output paths.
RunRecord run_experiment(const std::string& command, ExperimentConfig cfg, const RunOptions& opts = {});

// Human-readable summary of a stored record.
std::string describe(const RunRecord& r);

}  // namespace escapelab
