#include "denest/kde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace denest {

KdeConfig make_kde_config(double bandwidth, int dim) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde: bandwidth must be > 0");
  if (dim != 1 && dim != 2) throw std::invalid_argument("kde: dim must be 1 or 2");
  return KdeConfig{bandwidth, dim};
}

double gaussian_kernel(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double gaussian_kernel(double ux, double uy) {
  return std::exp(-0.5 * (ux * ux + uy * uy)) / (2.0 * std::numbers::pi);
}

double kernel_roughness(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("kernel_roughness: dim must be 1 or 2");
  return std::pow(4.0 * std::numbers::pi, -0.5 * dim);
}

NoiseScale compute_kbar(int n_samples, const KdeConfig& cfg) {
  if (n_samples < 1) throw std::invalid_argument("compute_kbar: n_samples must be >= 1");
  const double hd = std::pow(cfg.bandwidth, cfg.dim);
  return NoiseScale{kernel_roughness(cfg.dim) / (n_samples * hd)};
}

namespace {

template <bool kParallel>
DensityField kde_impl(const AgentEnsemble& ens, const Grid& g, const KdeConfig& cfg) {
  if (cfg.dim != 2) throw std::invalid_argument("kde_on_grid: grid evaluation needs dim == 2");
  if (!(cfg.bandwidth > 0.0)) throw std::invalid_argument("kde_on_grid: bandwidth must be > 0");
  const int n = static_cast<int>(ens.positions.size());
  if (n < 1) throw std::invalid_argument("kde_on_grid: ensemble is empty");

  DensityField out = DensityField::zero(g, ens.time);
  const double h = cfg.bandwidth;
  const double inv_h = 1.0 / h;
  const double norm = 1.0 / (n * h * h * 2.0 * std::numbers::pi);
  const int cells = g.cells();
#pragma omp parallel for schedule(static) if (kParallel)
  for (int k = 0; k < cells; ++k) {
    const double cx = g.center_x(g.cell_i(k));
    const double cy = g.center_y(g.cell_j(k));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ux = (cx - ens.positions[i][0]) * inv_h;
      const double uy = (cy - ens.positions[i][1]) * inv_h;
      acc += std::exp(-0.5 * (ux * ux + uy * uy));
    }
    out.values[k] = acc * norm;
  }
  return out;
}

}  // namespace

DensityField kde_on_grid(const AgentEnsemble& ens, const Grid& g, const KdeConfig& cfg) {
  return kde_impl<true>(ens, g, cfg);
}

DensityField kde_on_grid_serial(const AgentEnsemble& ens, const Grid& g, const KdeConfig& cfg) {
  return kde_impl<false>(ens, g, cfg);
}

}  // namespace denest
