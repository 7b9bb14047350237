#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "denest/dynamics.hpp"
#include "denest/fpops.hpp"
#include "denest/grid.hpp"
#include "denest/scenario.hpp"

namespace denest {

// Reference solution of the density equation for the rotating-mixture
// scenario, one field per outer step. It depends only on the deterministic
// configuration, so one solve serves every seed and bandwidth.
struct GroundTruth {
  std::vector<DensityField> states;
  double dt = 0.0;

  const DensityField& at_step(int k) const { return states.at(k); }
  int steps() const { return static_cast<int>(states.size()) - 1; }
};

// Solve from the uniform unit-mass start with the operator reassembled at
// each outer step and forward Euler at the stable inner step.
GroundTruth ground_truth_solve(const ScenarioConfig& cfg);

struct RunRecordRow {
  double time = 0.0;
  double l2_filter = 0.0;  // estimate error; unused in kde-only mode
  double l2_kde = 0.0;
  double mass_filter = 0.0;  // unused in kde-only mode
  double mass_kde = 0.0;
  double trace_cov = 0.0;  // zero in kde-only and open-loop modes
};

struct RunRecord {
  RunMode mode = RunMode::kFilter;
  double bandwidth = 0.0;
  std::uint64_t seed = 0;
  std::vector<RunRecordRow> rows;
  // Smallest estimate entry seen anywhere in the run; 0 in kde-only mode.
  // Diagnostic for the nonnegativity clamp, not serialized.
  double min_estimate = 0.0;
};

// Where a sub-run writes its artifacts; absent pieces are skipped.
struct RunOutput {
  std::string dir;         // record.csv, metadata.json, snapshots/ live here
  int snapshot_every = 0;  // 0 disables snapshots
};

// One (bandwidth, seed) run against a precomputed ground truth. Aborts with
// std::runtime_error on any non-finite value in the estimate, measurement,
// or covariance trace.
RunRecord run_single(const ScenarioConfig& cfg, double bandwidth, std::uint64_t seed,
                     const GroundTruth& truth, const std::optional<RunOutput>& out);

// Full sweep: ground truth once, then every seed for every bandwidth, wiring
// per-run output directories under the resolved output root. Returns the
// records in sweep order (bandwidth outer, seed inner).
std::vector<RunRecord> run_experiment(const ScenarioConfig& cfg);

// Mean of a row quantity over rows with time in [t_begin, t_end].
enum class RecordColumn { kL2Filter, kL2Kde, kMassFilter, kMassKde, kTraceCov };
double time_average(const RunRecord& rec, RecordColumn col, double t_begin, double t_end);

// CSV with one row per outer step. Column order is fixed:
// time,l2_error_filter,l2_error_kde,mass_filter,mass_kde,trace_P
// (kde-only mode: time,l2_error_kde,mass_kde).
void write_record_csv(const RunRecord& rec, std::ostream& os);
void write_record_csv_file(const RunRecord& rec, const std::string& path);

// Sub-run directory name, e.g. "run_s3_h0.05".
std::string subrun_dir_name(double bandwidth, std::uint64_t seed);

}  // namespace denest
