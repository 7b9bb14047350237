#include "denest/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace denest {

using nlohmann::json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kFilter: return "filter";
    case RunMode::kKdeOnly: return "kde-only";
    case RunMode::kOracle: return "oracle";
    case RunMode::kOpenLoop: return "open-loop";
  }
  return "filter";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "filter") return RunMode::kFilter;
  if (s == "kde-only") return RunMode::kKdeOnly;
  if (s == "oracle") return RunMode::kOracle;
  if (s == "open-loop") return RunMode::kOpenLoop;
  throw std::invalid_argument(
      "mode: expected one of filter, kde-only, oracle, open-loop; got \"" + s + "\"");
}

Grid ScenarioConfig::make_grid() const { return build_grid(nx, ny, xmin, xmax, ymin, ymax); }

int ScenarioConfig::steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

namespace {

const std::set<std::string> kKnownKeys = {
    "agents",     "diffusion", "grid", "bounds",      "dt",
    "t_end",      "bandwidths", "seeds", "mode",      "renormalize",
    "snapshot_every", "out_dir"};

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument(origin + ": top level must be an object");

  std::vector<std::string> unknown;
  for (const auto& item : j.items()) {
    if (!kKnownKeys.count(item.key())) unknown.push_back(item.key());
  }
  if (!unknown.empty()) {
    std::string msg = origin + ": unknown key(s):";
    for (const auto& k : unknown) msg += " \"" + k + "\"";
    throw std::invalid_argument(msg);
  }

  ScenarioConfig cfg;
  try {
    if (j.contains("agents")) cfg.agents = j.at("agents").get<int>();
    if (j.contains("diffusion")) cfg.diffusion = j.at("diffusion").get<double>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.is_number_integer()) {
        cfg.nx = cfg.ny = g.get<int>();
      } else if (g.is_array() && g.size() == 2) {
        cfg.nx = g.at(0).get<int>();
        cfg.ny = g.at(1).get<int>();
      } else {
        throw std::invalid_argument("grid: expected an integer or [nx, ny]");
      }
    }
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      if (!b.is_array() || b.size() != 4) {
        throw std::invalid_argument("bounds: expected [xmin, xmax, ymin, ymax]");
      }
      cfg.xmin = b.at(0).get<double>();
      cfg.xmax = b.at(1).get<double>();
      cfg.ymin = b.at(2).get<double>();
      cfg.ymax = b.at(3).get<double>();
    }
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("bandwidths")) cfg.bandwidths = j.at("bandwidths").get<std::vector<double>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("mode")) cfg.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("renormalize")) cfg.renormalize = j.at("renormalize").get<bool>();
    if (j.contains("snapshot_every")) cfg.snapshot_every = j.at("snapshot_every").get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path);
}

void validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> problems;
  auto bad = [&problems](const std::string& msg) { problems.push_back(msg); };

  if (cfg.agents < 1) bad("agents: must be >= 1, got " + std::to_string(cfg.agents));
  if (!(cfg.diffusion > 0.0)) bad("diffusion: must be > 0");
  if (cfg.nx < 3 || cfg.ny < 3) {
    bad("grid: nx and ny must be >= 3, got " + std::to_string(cfg.nx) + "x" +
        std::to_string(cfg.ny));
  }
  if (!(cfg.xmin < cfg.xmax)) bad("bounds: xmin must be < xmax");
  if (!(cfg.ymin < cfg.ymax)) bad("bounds: ymin must be < ymax");
  if (!(cfg.dt > 0.0)) bad("dt: must be > 0");
  if (!(cfg.t_end > 0.0)) bad("t_end: must be > 0");
  if (cfg.dt > 0.0 && cfg.t_end > 0.0) {
    const double ratio = cfg.t_end / cfg.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
      bad("t_end: must be an integer multiple of dt");
    }
  }
  if (cfg.bandwidths.empty()) bad("bandwidths: need at least one value");
  for (double h : cfg.bandwidths) {
    if (!(h > 0.0)) bad("bandwidths: values must be > 0");
  }
  if (cfg.seeds.empty()) bad("seeds: need at least one value");
  if (cfg.snapshot_every < 0) bad("snapshot_every: must be >= 0 (0 disables snapshots)");

  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
}

std::string resolve_out_dir(const ScenarioConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("DENEST_OUT_DIR"); env && *env) return env;
  return "out";
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["agents"] = cfg.agents;
  j["diffusion"] = cfg.diffusion;
  j["grid"] = {cfg.nx, cfg.ny};
  j["bounds"] = {cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax};
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["bandwidths"] = cfg.bandwidths;
  j["seeds"] = cfg.seeds;
  j["mode"] = to_string(cfg.mode);
  j["renormalize"] = cfg.renormalize;
  j["snapshot_every"] = cfg.snapshot_every;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2);
}

}  // namespace denest
