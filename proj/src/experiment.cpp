#include "denest/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "denest/filter.hpp"
#include "denest/kde.hpp"
#include "denest/snapshot_io.hpp"
#include "denest/version.hpp"

namespace denest {

namespace fs = std::filesystem;

GroundTruth ground_truth_solve(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const Grid grid = cfg.make_grid();
  const MixtureScenario scen{.diffusion = cfg.diffusion};
  const VelocityField vel = scenario_velocity(scen);
  const DiffusionModel diff = make_diffusion(cfg.diffusion);
  const int steps = cfg.steps();

  GroundTruth truth;
  truth.dt = cfg.dt;
  truth.states.reserve(steps + 1);

  const double area = (grid.xmax - grid.xmin) * (grid.ymax - grid.ymin);
  DensityField p = DensityField::constant(grid, 1.0 / area, 0.0);
  for (int k = 0; k < steps; ++k) {
    truth.states.push_back(p);
    const FpOperator op = assemble_operator(grid, vel, diff, k * cfg.dt);
    predict(op, p, cfg.dt);
    p.time = (k + 1) * cfg.dt;
  }
  truth.states.push_back(p);
  return truth;
}

namespace {

std::string iso_timestamp() {
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_metadata(const ScenarioConfig& cfg, double bandwidth, std::uint64_t seed,
                    double kbar, const std::string& path) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["bandwidth"] = bandwidth;
  j["seed"] = seed;
  j["mode"] = to_string(cfg.mode);
  j["kbar"] = kbar;
  j["rng"] = "splitmix64 counter streams keyed by (seed, agent, step); Box-Muller normals";
  j["version"] = kVersion;
  j["started_at"] = iso_timestamp();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write metadata: " + path);
  os << j.dump(2) << "\n";
}

void write_snapshots(const fs::path& dir, int step, const DensityField& truth,
                     const DensityField& kde, const DensityField* estimate,
                     const AgentEnsemble& ens) {
  char tag[16];
  std::snprintf(tag, sizeof tag, "%04d", step);
  write_grid_text_file(truth, (dir / (std::string("step_") + tag + "_truth.txt")).string());
  write_grid_text_file(kde, (dir / (std::string("step_") + tag + "_kde.txt")).string());
  if (estimate) {
    write_grid_text_file(*estimate,
                         (dir / (std::string("step_") + tag + "_estimate.txt")).string());
  }
  write_agents_text_file(ens, (dir / (std::string("step_") + tag + "_agents.txt")).string());
}

}  // namespace

RunRecord run_single(const ScenarioConfig& cfg, double bandwidth, std::uint64_t seed,
                     const GroundTruth& truth, const std::optional<RunOutput>& out) {
  const Grid grid = cfg.make_grid();
  const int steps = cfg.steps();
  if (truth.steps() != steps || std::abs(truth.dt - cfg.dt) > 1e-12) {
    throw std::invalid_argument("run_single: ground truth does not match the configuration");
  }

  const MixtureScenario scen{.diffusion = cfg.diffusion};
  const VelocityField vel = scenario_velocity(scen);
  const DiffusionModel diff = make_diffusion(cfg.diffusion);
  const KdeConfig kcfg = make_kde_config(bandwidth);
  const NoiseScale kbar = compute_kbar(cfg.agents, kcfg);
  const FilterOptions fopt{.renormalize = cfg.renormalize};

  fs::path snap_dir;
  if (out && out->snapshot_every > 0) {
    snap_dir = fs::path(out->dir) / "snapshots";
    fs::create_directories(snap_dir);
  }

  AgentEnsemble ens = init_agents(cfg.agents, grid, seed);
  DensityField y = kde_on_grid(ens, grid, kcfg);

  const bool has_estimate = cfg.mode != RunMode::kKdeOnly;
  const bool has_cov = cfg.mode == RunMode::kFilter || cfg.mode == RunMode::kOracle;
  FilterState state;
  if (has_estimate) state = init_filter(y);

  RunRecord rec;
  rec.mode = cfg.mode;
  rec.bandwidth = bandwidth;
  rec.seed = seed;
  rec.rows.reserve(steps + 1);

  for (int k = 0;; ++k) {
    const double t = k * cfg.dt;
    const DensityField& pt = truth.at_step(k);

    RunRecordRow row;
    row.time = t;
    row.l2_kde = l2_error(y, pt);
    row.mass_kde = integrate(y);
    if (has_estimate) {
      row.l2_filter = l2_error(state.estimate, pt);
      row.mass_filter = integrate(state.estimate);
      if (has_cov) row.trace_cov = state.covariance.matrix.trace();
      if (k == 0) rec.min_estimate = state.estimate.values.minCoeff();
      rec.min_estimate = std::min(rec.min_estimate, state.estimate.values.minCoeff());
    }
    if (!std::isfinite(row.l2_kde) || !std::isfinite(row.mass_kde) ||
        !std::isfinite(row.l2_filter) || !std::isfinite(row.trace_cov)) {
      throw std::runtime_error("run_single: non-finite value at t = " + std::to_string(t) +
                               " (seed " + std::to_string(seed) + ", bandwidth " +
                               std::to_string(bandwidth) + ")");
    }
    rec.rows.push_back(row);

    if (out && out->snapshot_every > 0 && k % out->snapshot_every == 0) {
      write_snapshots(snap_dir, k, pt, y, has_estimate ? &state.estimate : nullptr, ens);
    }
    if (k == steps) break;

    // Agents move first so the assimilated measurement is the one taken at
    // the end of the interval the filter is stepping across.
    const FpOperator op = assemble_operator(grid, vel, diff, t);
    step_agents(ens, vel, diff, cfg.dt, grid);
    y = kde_on_grid(ens, grid, kcfg);
    switch (cfg.mode) {
      case RunMode::kFilter:
        filter_step(state, op, y, kbar, cfg.dt, fopt);
        break;
      case RunMode::kOracle:
        oracle_filter_step(state, op, y, truth.at_step(k + 1), kbar, cfg.dt, fopt);
        break;
      case RunMode::kOpenLoop:
        predict(op, state.estimate, cfg.dt);
        if (cfg.renormalize) {
          state.estimate.values /= integrate(state.estimate);
        }
        break;
      case RunMode::kKdeOnly:
        break;
    }
  }

  if (out) {
    fs::create_directories(out->dir);
    write_record_csv_file(rec, (fs::path(out->dir) / "record.csv").string());
    write_metadata(cfg, bandwidth, seed, kbar.kbar,
                   (fs::path(out->dir) / "metadata.json").string());
  }
  return rec;
}

std::vector<RunRecord> run_experiment(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const GroundTruth truth = ground_truth_solve(cfg);
  const fs::path root = resolve_out_dir(cfg);
  fs::create_directories(root);

  std::vector<RunRecord> records;
  records.reserve(cfg.bandwidths.size() * cfg.seeds.size());
  for (double h : cfg.bandwidths) {
    for (std::uint64_t seed : cfg.seeds) {
      RunOutput out;
      out.dir = (root / subrun_dir_name(h, seed)).string();
      out.snapshot_every = cfg.snapshot_every;
      records.push_back(run_single(cfg, h, seed, truth, out));
    }
  }
  return records;
}

double time_average(const RunRecord& rec, RecordColumn col, double t_begin, double t_end) {
  double sum = 0.0;
  int count = 0;
  for (const RunRecordRow& row : rec.rows) {
    if (row.time < t_begin - 1e-9 || row.time > t_end + 1e-9) continue;
    switch (col) {
      case RecordColumn::kL2Filter: sum += row.l2_filter; break;
      case RecordColumn::kL2Kde: sum += row.l2_kde; break;
      case RecordColumn::kMassFilter: sum += row.mass_filter; break;
      case RecordColumn::kMassKde: sum += row.mass_kde; break;
      case RecordColumn::kTraceCov: sum += row.trace_cov; break;
    }
    ++count;
  }
  if (count == 0) throw std::invalid_argument("time_average: no rows in the requested window");
  return sum / count;
}

void write_record_csv(const RunRecord& rec, std::ostream& os) {
  char buf[160];
  const bool kde_only = rec.mode == RunMode::kKdeOnly;
  os << (kde_only ? "time,l2_error_kde,mass_kde\n"
                  : "time,l2_error_filter,l2_error_kde,mass_filter,mass_kde,trace_P\n");
  for (const RunRecordRow& row : rec.rows) {
    if (kde_only) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.time, row.l2_kde,
                    row.mass_kde);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.time,
                    row.l2_filter, row.l2_kde, row.mass_filter, row.mass_kde, row.trace_cov);
    }
    os << buf;
  }
}

void write_record_csv_file(const RunRecord& rec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write record: " + path);
  write_record_csv(rec, os);
}

std::string subrun_dir_name(double bandwidth, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "run_s%llu_h%g", static_cast<unsigned long long>(seed),
                bandwidth);
  return buf;
}

}  // namespace denest
