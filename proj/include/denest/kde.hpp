#pragma once

#include "denest/dynamics.hpp"
#include "denest/grid.hpp"

namespace denest {

// Kernel density estimation with the standard Gaussian kernel
// K(u) = (2*pi)^(-d/2) * exp(-|u|^2 / 2) in d = 1 or 2 dimensions.
struct KdeConfig {
  double bandwidth = 0.05;
  int dim = 2;
};

KdeConfig make_kde_config(double bandwidth, int dim = 2);

double gaussian_kernel(double u);             // d = 1
double gaussian_kernel(double ux, double uy); // d = 2

// Roughness of the kernel, integral of K^2 over R^d: (4*pi)^(-d/2).
double kernel_roughness(int dim);

// Per-cell pointwise variance scale of the estimate: roughness / (n * h^d).
// The measurement noise model uses this value times the local density.
struct NoiseScale {
  double kbar = 0.0;
};

NoiseScale compute_kbar(int n_samples, const KdeConfig& cfg);

// Density estimate at every cell center: (1/(n h^2)) * sum_i K((c - X_i)/h).
// Direct evaluation over all samples; parallel over cells, each cell summed
// in sample order so the result is thread-count independent.
DensityField kde_on_grid(const AgentEnsemble& ens, const Grid& g, const KdeConfig& cfg);

// Serial reference for the parallel evaluation.
DensityField kde_on_grid_serial(const AgentEnsemble& ens, const Grid& g, const KdeConfig& cfg);

}  // namespace denest
