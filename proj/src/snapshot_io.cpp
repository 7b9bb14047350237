#include "denest/snapshot_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace denest {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_grid_text(const DensityField& f, std::ostream& os) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d %d ", f.grid.nx, f.grid.ny);
  os << buf;
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", f.grid.xmin, f.grid.xmax,
                f.grid.ymin, f.grid.ymax, f.time);
  os << buf;
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, i + 1 < f.grid.nx ? "%.17g " : "%.17g\n",
                    f.values[f.grid.flat_index(i, j)]);
      os << buf;
    }
  }
}

void write_grid_text_file(const DensityField& f, const std::string& path) {
  auto os = open_out(path);
  write_grid_text(f, os);
}

DensityField read_grid_text(std::istream& is) {
  int nx = 0, ny = 0;
  double xmin, xmax, ymin, ymax, t;
  if (!(is >> nx >> ny >> xmin >> xmax >> ymin >> ymax >> t)) {
    throw std::runtime_error("grid snapshot: malformed header");
  }
  DensityField f;
  f.grid = build_grid(nx, ny, xmin, xmax, ymin, ymax);
  f.time = t;
  f.values.resize(f.grid.cells());
  for (int k = 0; k < f.grid.cells(); ++k) {
    if (!(is >> f.values[k])) {
      throw std::runtime_error("grid snapshot: expected " + std::to_string(f.grid.cells()) +
                               " values, got " + std::to_string(k));
    }
  }
  return f;
}

DensityField read_grid_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_grid_text(is);
}

void write_agents_text(const AgentEnsemble& ens, std::ostream& os) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu %.17g\n", ens.positions.size(), ens.time);
  os << buf;
  for (const Vec2& p : ens.positions) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    os << buf;
  }
}

void write_agents_text_file(const AgentEnsemble& ens, const std::string& path) {
  auto os = open_out(path);
  write_agents_text(ens, os);
}

}  // namespace denest
