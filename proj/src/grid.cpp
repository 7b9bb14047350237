#include "denest/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace denest {

DensityField DensityField::constant(const Grid& g, double value, double time) {
  DensityField f;
  f.grid = g;
  f.values = Eigen::VectorXd::Constant(g.cells(), value);
  f.time = time;
  return f;
}

DensityField DensityField::zero(const Grid& g, double time) {
  return constant(g, 0.0, time);
}

Grid build_grid(int nx, int ny, double xmin, double xmax, double ymin, double ymax) {
  if (nx < 3 || ny < 3) {
    throw std::invalid_argument("build_grid: nx and ny must be >= 3, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  }
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw std::invalid_argument("build_grid: bounds must satisfy xmin < xmax and ymin < ymax");
  }
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.xmin = xmin;
  g.xmax = xmax;
  g.ymin = ymin;
  g.ymax = ymax;
  g.dx = (xmax - xmin) / nx;
  g.dy = (ymax - ymin) / ny;
  return g;
}

double integrate(const DensityField& field) {
  return field.values.sum() * field.grid.cell_area();
}

namespace {

// Index along one axis. Cell i covers [min + i*d, min + (i+1)*d), except the
// last cell which also owns the upper domain boundary. The floor result is
// corrected against the canonical edge positions so that a point exactly on
// an edge always lands in the higher cell regardless of rounding in x/d.
int axis_index(double x, double min, double d, int n) {
  int i = static_cast<int>(std::floor((x - min) / d));
  if (i < 0) i = 0;
  if (i > n - 1) i = n - 1;
  while (i + 1 <= n - 1 && x >= min + (i + 1) * d) ++i;
  while (i - 1 >= 0 && x < min + i * d) --i;
  return i;
}

}  // namespace

std::optional<int> locate_cell(const Grid& g, double x, double y) {
  if (x < g.xmin || x > g.xmax || y < g.ymin || y > g.ymax) return std::nullopt;
  const int i = axis_index(x, g.xmin, g.dx, g.nx);
  const int j = axis_index(y, g.ymin, g.dy, g.ny);
  return g.flat_index(i, j);
}

double l2_error(const DensityField& a, const DensityField& b) {
  if (!a.grid.same_extent(b.grid)) {
    throw std::invalid_argument("l2_error: fields live on different grids");
  }
  return std::sqrt((a.values - b.values).squaredNorm() * a.grid.cell_area());
}

}  // namespace denest
