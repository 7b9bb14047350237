// Command-line front end: run experiments, validate configurations, render
// plots from run artifacts.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "denest/experiment.hpp"
#include "denest/fpops.hpp"
#include "denest/plot.hpp"
#include "denest/scenario.hpp"
#include "denest/snapshot_io.hpp"
#include "denest/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliOverrides {
  std::string config_path;
  int agents = -1;
  double diffusion = -1.0;
  std::string grid;
  std::vector<double> bounds;
  double dt = -1.0;
  double t_end = -1.0;
  std::vector<double> bandwidths;
  std::vector<std::uint64_t> seeds;
  std::string mode;
  bool renormalize = false;
  bool renormalize_set = false;
  int snapshot_every = -1;
  std::string out_dir;
};

void add_override_flags(CLI::App& app, CliOverrides& o) {
  app.add_option("--config", o.config_path, "JSON configuration file");
  app.add_option("--agents", o.agents, "number of agents");
  app.add_option("--diffusion", o.diffusion, "diffusion strength");
  app.add_option("--grid", o.grid, "grid as N or NXxNY, e.g. 30 or 40x30");
  app.add_option("--bounds", o.bounds, "domain as xmin xmax ymin ymax")->expected(4);
  app.add_option("--dt", o.dt, "outer step size");
  app.add_option("--t-end", o.t_end, "time horizon");
  app.add_option("--bandwidth", o.bandwidths, "KDE bandwidth (repeatable)");
  app.add_option("--seed", o.seeds, "RNG seed (repeatable)");
  app.add_option("--mode", o.mode, "filter | kde-only | oracle | open-loop");
  app.add_flag("--renormalize", o.renormalize, "rescale the estimate to unit mass each step")
      ->trigger_on_parse();
  app.add_option("--snapshot-every", o.snapshot_every, "steps between snapshots, 0 disables");
  app.add_option("--out", o.out_dir, "output directory (default: $DENEST_OUT_DIR or ./out)");
}

denest::ScenarioConfig resolve_config(const CLI::App& cmd, const CliOverrides& o) {
  denest::ScenarioConfig cfg;
  if (!o.config_path.empty()) cfg = denest::parse_config(o.config_path);
  if (o.agents >= 0) cfg.agents = o.agents;
  if (o.diffusion >= 0.0) cfg.diffusion = o.diffusion;
  if (!o.grid.empty()) {
    int nx = 0, ny = 0;
    if (std::sscanf(o.grid.c_str(), "%dx%d", &nx, &ny) == 2) {
      cfg.nx = nx;
      cfg.ny = ny;
    } else if (std::sscanf(o.grid.c_str(), "%d", &nx) == 1) {
      cfg.nx = cfg.ny = nx;
    } else {
      throw std::invalid_argument("--grid: expected N or NXxNY, got \"" + o.grid + "\"");
    }
  }
  if (o.bounds.size() == 4) {
    cfg.xmin = o.bounds[0];
    cfg.xmax = o.bounds[1];
    cfg.ymin = o.bounds[2];
    cfg.ymax = o.bounds[3];
  }
  if (o.dt > 0.0) cfg.dt = o.dt;
  if (o.t_end > 0.0) cfg.t_end = o.t_end;
  if (!o.bandwidths.empty()) cfg.bandwidths = o.bandwidths;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (!o.mode.empty()) cfg.mode = denest::run_mode_from_string(o.mode);
  if (cmd.count("--renormalize") > 0) cfg.renormalize = o.renormalize;
  if (o.snapshot_every >= 0) cfg.snapshot_every = o.snapshot_every;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  denest::validate_config(cfg);
  return cfg;
}

int cmd_run(const CLI::App& cmd, const CliOverrides& o, const std::string& dump_operator) {
  const denest::ScenarioConfig cfg = resolve_config(cmd, o);
  const std::string root = denest::resolve_out_dir(cfg);

  if (!dump_operator.empty()) {
    const denest::MixtureScenario scen{.diffusion = cfg.diffusion};
    const denest::FpOperator op =
        denest::assemble_operator(cfg.make_grid(), denest::scenario_velocity(scen),
                                  denest::make_diffusion(cfg.diffusion), 0.0);
    std::ofstream os(dump_operator);
    if (!os) throw std::runtime_error("cannot write operator dump: " + dump_operator);
    denest::dump_coo(op, os);
    std::printf("wrote operator at t=0 to %s\n", dump_operator.c_str());
  }

  const auto records = denest::run_experiment(cfg);
  for (const auto& rec : records) {
    const double half = cfg.t_end / 2.0;
    const double kde_avg =
        denest::time_average(rec, denest::RecordColumn::kL2Kde, half, cfg.t_end);
    std::printf("%s: late-window mean L2  kde %.4f",
                denest::subrun_dir_name(rec.bandwidth, rec.seed).c_str(), kde_avg);
    if (rec.mode != denest::RunMode::kKdeOnly) {
      const double est_avg =
          denest::time_average(rec, denest::RecordColumn::kL2Filter, half, cfg.t_end);
      std::printf("  %s %.4f", denest::to_string(rec.mode).c_str(), est_avg);
    }
    std::printf("\n");
  }
  std::printf("wrote %zu run(s) under %s\n", records.size(), root.c_str());
  return 0;
}

int cmd_validate(const CLI::App& cmd, const CliOverrides& o) {
  const denest::ScenarioConfig cfg = resolve_config(cmd, o);
  std::printf("configuration OK\n%s\n", denest::config_to_json(cfg).c_str());
  return 0;
}

int cmd_plot(const std::string& dir, const std::string& out_arg, bool heatmaps) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) {
    throw std::invalid_argument("plot: not a directory: " + dir);
  }
  const fs::path out = out_arg.empty() ? root / "plots" : fs::path(out_arg);
  fs::create_directories(out);

  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("run_", 0) == 0 &&
        fs::exists(entry.path() / "record.csv")) {
      run_dirs.push_back(entry.path());
    }
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) throw std::invalid_argument("plot: no run_*/record.csv under " + dir);

  std::vector<denest::RunRecord> all;
  int images = 0;
  for (const auto& rd : run_dirs) {
    denest::RunRecord rec = denest::read_record_csv_file((rd / "record.csv").string());
    const std::string name = rd.filename().string();
    std::ofstream os(out / (name + "_errors.svg"));
    os << denest::render_error_curves_svg({rec}, name);
    ++images;
    all.push_back(std::move(rec));

    if (heatmaps && fs::is_directory(rd / "snapshots")) {
      for (const auto& snap : fs::directory_iterator(rd / "snapshots")) {
        const std::string fn = snap.path().filename().string();
        if (snap.path().extension() != ".txt" || fn.find("agents") != std::string::npos) {
          continue;
        }
        const denest::DensityField f = denest::read_grid_text_file(snap.path().string());
        std::ofstream hs(out / (name + "_" + snap.path().stem().string() + ".svg"));
        hs << denest::render_heatmap_svg(f, name + " " + snap.path().stem().string());
        ++images;
      }
    }
  }
  std::ofstream os(out / "errors_all.svg");
  os << denest::render_error_curves_svg(all, "all runs");
  ++images;
  std::printf("wrote %d image(s) under %s\n", images, out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density estimation for stochastic agent swarms"};
  app.set_version_flag("--version", denest::kVersion);
  app.require_subcommand(1);

  CliOverrides run_o, val_o;
  std::string dump_operator;
  CLI::App* run = app.add_subcommand("run", "run the experiment sweep");
  add_override_flags(*run, run_o);
  run->add_option("--dump-operator", dump_operator,
                  "also write the t=0 transport operator as 'row col value' lines");

  CLI::App* val = app.add_subcommand("validate-config", "check a configuration and echo it");
  add_override_flags(*val, val_o);

  std::string plot_dir, plot_out;
  bool heatmaps = false;
  CLI::App* plot = app.add_subcommand("plot", "render SVG plots from run output");
  plot->add_option("--dir", plot_dir, "experiment output directory")->required();
  plot->add_option("--out", plot_out, "plot output directory (default: DIR/plots)");
  plot->add_flag("--heatmaps", heatmaps, "also render snapshot heatmaps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(*run, run_o, dump_operator);
    if (val->parsed()) return cmd_validate(*val, val_o);
    if (plot->parsed()) return cmd_plot(plot_dir, plot_out, heatmaps);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error (runtime): %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
