#pragma once

#include <Eigen/Core>
#include <optional>

namespace denest {

// Uniform cell-centered grid on the rectangle [xmin,xmax] x [ymin,ymax].
// Cells are indexed (i, j) with i along x and j along y; the flattened
// index is j * nx + i (row-major, x fastest).
struct Grid {
  int nx = 0;
  int ny = 0;
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  int cells() const { return nx * ny; }
  double cell_area() const { return dx * dy; }

  int flat_index(int i, int j) const { return j * nx + i; }
  int cell_i(int k) const { return k % nx; }
  int cell_j(int k) const { return k / nx; }

  double center_x(int i) const { return xmin + (i + 0.5) * dx; }
  double center_y(int j) const { return ymin + (j + 0.5) * dy; }

  bool same_extent(const Grid& o) const {
    return nx == o.nx && ny == o.ny && xmin == o.xmin && xmax == o.xmax &&
           ymin == o.ymin && ymax == o.ymax;
  }
};

// A scalar field sampled at cell centers, tagged with the time it belongs to.
struct DensityField {
  Grid grid;
  Eigen::VectorXd values;
  double time = 0.0;

  static DensityField constant(const Grid& g, double value, double time = 0.0);
  static DensityField zero(const Grid& g, double time = 0.0);
};

// Requires nx, ny >= 3 and positively ordered bounds; throws
// std::invalid_argument otherwise.
Grid build_grid(int nx, int ny, double xmin, double xmax, double ymin, double ymax);

// Midpoint-rule integral: sum of values times cell area.
double integrate(const DensityField& field);

// Cell containing (x, y), or nullopt for points outside the closed domain.
// A point exactly on an interior cell edge belongs to the higher-index cell;
// the domain boundary itself is inside (x == xmax maps to column nx - 1).
std::optional<int> locate_cell(const Grid& g, double x, double y);

// L2 distance between two fields on the same grid (midpoint quadrature).
// Throws std::invalid_argument if the grids differ.
double l2_error(const DensityField& a, const DensityField& b);

}  // namespace denest
