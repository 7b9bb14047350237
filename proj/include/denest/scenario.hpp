#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "denest/grid.hpp"

namespace denest {

enum class RunMode { kFilter, kKdeOnly, kOracle, kOpenLoop };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

// Everything a reproducible experiment run needs. Defaults describe the
// reference benchmark: 300 agents on the unit square with diffusion 0.05,
// a 30x30 grid, dt = 0.1 out to t = 30, bandwidth 0.05, seeds 1..5.
struct ScenarioConfig {
  int agents = 300;
  double diffusion = 0.05;
  int nx = 30;
  int ny = 30;
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
  double dt = 0.1;
  double t_end = 30.0;
  std::vector<double> bandwidths = {0.05};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  RunMode mode = RunMode::kFilter;
  bool renormalize = false;
  int snapshot_every = 50;  // outer steps between grid snapshots; 0 disables
  std::string out_dir;      // empty: resolved from DENEST_OUT_DIR, else "out"

  Grid make_grid() const;
  int steps() const;  // outer steps to cover [0, t_end]
};

// Parse a JSON config file. Unknown keys are rejected; missing keys keep
// their defaults; all validation problems are reported together.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

// Throws std::invalid_argument listing every violated constraint by field
// name, one per line.
void validate_config(const ScenarioConfig& cfg);

// Resolved output directory: explicit value, else DENEST_OUT_DIR, else "out".
std::string resolve_out_dir(const ScenarioConfig& cfg);

// Serialized form (also embedded in run metadata).
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace denest
