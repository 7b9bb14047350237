#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "denest/kde.hpp"
#include "denest/rng.hpp"

using namespace denest;

namespace {

// Estimate at a single point, written independently of the library loop.
double kde_at_point(const std::vector<Vec2>& samples, double h, double x, double y) {
  double acc = 0.0;
  for (const Vec2& s : samples) {
    acc += gaussian_kernel((x - s[0]) / h, (y - s[1]) / h);
  }
  return acc / (samples.size() * h * h);
}

}  // namespace

TEST_CASE("kernel values at the origin") {
  CHECK(gaussian_kernel(0.0) == doctest::Approx(0.39894228040143268).epsilon(1e-14));
  CHECK(gaussian_kernel(0.0, 0.0) == doctest::Approx(0.15915494309189535).epsilon(1e-14));
  CHECK(gaussian_kernel(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
}

TEST_CASE("kernel roughness matches direct quadrature") {
  // Midpoint rule for the integral of K^2; the tails beyond |u| = 8 are
  // far below the tolerance.
  const int m = 4000;
  const double lo = -8.0, hi = 8.0;
  const double step = (hi - lo) / m;
  double r1 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = lo + (i + 0.5) * step;
    const double k = gaussian_kernel(u);
    r1 += k * k * step;
  }
  CHECK(kernel_roughness(1) == doctest::Approx(r1).epsilon(1e-8));
  CHECK(kernel_roughness(1) == doctest::Approx(0.28209479177387814).epsilon(1e-12));

  const int m2 = 600;
  const double step2 = (hi - lo) / m2;
  double r2 = 0.0;
  for (int i = 0; i < m2; ++i) {
    for (int j = 0; j < m2; ++j) {
      const double ux = lo + (i + 0.5) * step2;
      const double uy = lo + (j + 0.5) * step2;
      const double k = gaussian_kernel(ux, uy);
      r2 += k * k * step2 * step2;
    }
  }
  CHECK(kernel_roughness(2) == doctest::Approx(r2).epsilon(1e-8));
  CHECK(kernel_roughness(2) == doctest::Approx(0.07957747154594767).epsilon(1e-12));
}

TEST_CASE("noise scale for the benchmark setting") {
  // n = 300, h = 0.05, d = 2: (4 pi)^-1 / (300 * 0.0025).
  const NoiseScale k = compute_kbar(300, make_kde_config(0.05));
  CHECK(k.kbar == doctest::Approx(0.10610329539459689).epsilon(1e-12));
  CHECK_THROWS_AS(compute_kbar(0, make_kde_config(0.05)), std::invalid_argument);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(make_kde_config(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kde_config(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_kde_config(0.05, 3), std::invalid_argument);
  const Grid g = build_grid(10, 10, 0.0, 1.0, 0.0, 1.0);
  AgentEnsemble ens;
  ens.positions = {{0.5, 0.5}};
  CHECK_THROWS_AS(kde_on_grid(ens, g, KdeConfig{0.05, 1}), std::invalid_argument);
}

TEST_CASE("single sample at a cell center gives the kernel peak") {
  const Grid g = build_grid(30, 30, 0.0, 1.0, 0.0, 1.0);
  AgentEnsemble ens;
  const double cx = g.center_x(15), cy = g.center_y(15);
  ens.positions = {{cx, cy}};
  const DensityField f = kde_on_grid(ens, g, make_kde_config(0.05));

  // 1 / (n h^2 2 pi) with n = 1, h = 0.05.
  CHECK(f.values[g.flat_index(15, 15)] == doctest::Approx(63.661977236758138).epsilon(1e-12));
  // One cell over, the kernel has decayed by exp(-(dx/h)^2 / 2).
  const double expect = 63.661977236758138 * std::exp(-0.5 * std::pow((1.0 / 30) / 0.05, 2));
  CHECK(f.values[g.flat_index(16, 15)] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("grid evaluation matches an independent point evaluation") {
  const Grid g = build_grid(10, 10, 0.0, 1.0, 0.0, 1.0);
  AgentEnsemble ens = init_agents(50, g, 42);
  const DensityField f = kde_on_grid(ens, g, make_kde_config(0.07));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double want = kde_at_point(ens.positions, 0.07, g.center_x(i), g.center_y(j));
      CHECK(f.values[g.flat_index(i, j)] == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("estimate is invariant under sample permutation") {
  const Grid g = build_grid(20, 20, 0.0, 1.0, 0.0, 1.0);
  AgentEnsemble ens = init_agents(300, g, 5);
  const DensityField a = kde_on_grid(ens, g, make_kde_config(0.05));

  std::mt19937 rng(123);
  std::shuffle(ens.positions.begin(), ens.positions.end(), rng);
  const DensityField b = kde_on_grid(ens, g, make_kde_config(0.05));
  for (int k = 0; k < g.cells(); ++k) {
    CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-12));
  }
}

TEST_CASE("estimate is nonnegative and roughly unit mass") {
  const Grid g = build_grid(30, 30, 0.0, 1.0, 0.0, 1.0);
  const AgentEnsemble ens = init_agents(300, g, 8);
  const DensityField f = kde_on_grid(ens, g, make_kde_config(0.05));
  CHECK(f.values.minCoeff() >= 0.0);
  // Kernel mass leaks across the boundary, so a bit below 1 is expected.
  const double mass = integrate(f);
  CHECK(mass > 0.8);
  CHECK(mass < 1.05);
}

TEST_CASE("for uniform samples the error shrinks as the bandwidth grows") {
  // Variance ~ roughness / (n h^2) dominates at small h; boundary bias at
  // h = 0.1 is still far smaller on a 30x30 grid.
  const Grid g = build_grid(30, 30, 0.0, 1.0, 0.0, 1.0);
  const DensityField uniform = DensityField::constant(g, 1.0);
  const AgentEnsemble ens = init_agents(300, g, 31);
  const double e003 = l2_error(kde_on_grid(ens, g, make_kde_config(0.03)), uniform);
  const double e005 = l2_error(kde_on_grid(ens, g, make_kde_config(0.05)), uniform);
  const double e010 = l2_error(kde_on_grid(ens, g, make_kde_config(0.10)), uniform);
  CHECK(e003 > e005);
  CHECK(e005 > e010);
}

TEST_CASE("pointwise variance follows the density times the noise scale") {
  // Replicated draws from a known density; the empirical variance of the
  // estimate at the mode should match f(x) * roughness / (n h^2) to within
  // the finite-n and smoothing corrections (both under ten percent here).
  const Grid g = build_grid(15, 15, 0.0, 1.0, 0.0, 1.0);
  const int cell = g.flat_index(7, 7);  // center (0.5, 0.5)
  const double sigma = 0.25;
  const int n = 300;
  const int reps = 2000;
  const KdeConfig cfg = make_kde_config(0.05);

  // Truncated normal density value at the center: phi(0)^2 / Z with
  // Z = (Phi(2) - Phi(-2))^2.
  const double phi0 = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  const double z1 = std::erf(2.0 / std::sqrt(2.0));  // Phi(2) - Phi(-2)
  const double f_center = phi0 * phi0 / (z1 * z1);

  double sum = 0.0, sum2 = 0.0;
  AgentEnsemble ens;
  ens.positions.resize(n);
  std::uint64_t draw = 0;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      // Rejection sampling of the truncated Gaussian, counter-keyed.
      for (;;) {
        StreamRng rng(1234, 0, draw++);
        double z0, z1n;
        rng.next_normal_pair(z0, z1n);
        const double x = 0.5 + sigma * z0;
        const double y = 0.5 + sigma * z1n;
        if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0) {
          ens.positions[i] = {x, y};
          break;
        }
      }
    }
    const DensityField f = kde_on_grid(ens, g, cfg);
    sum += f.values[cell];
    sum2 += f.values[cell] * f.values[cell];
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  const double predicted = f_center * compute_kbar(n, cfg).kbar;
  CHECK(var == doctest::Approx(predicted).epsilon(0.20));
  CHECK(mean == doctest::Approx(f_center).epsilon(0.10));
}

TEST_CASE("estimates at well-separated points are nearly uncorrelated") {
  // Two points 0.3 apart with h = 0.03 share no kernel mass; across
  // replicated uniform draws the correlation should sit near the small
  // negative value forced by the shared sample count.
  const double h = 0.03;
  const int n = 300;
  const int reps = 4000;
  const double ax = 0.35, ay = 0.35, bx = 0.65, by = 0.35;

  double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
  std::vector<Vec2> samples(n);
  std::uint64_t draw = 0;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      StreamRng rng(977, 1, draw++);
      samples[i] = {rng.next_unit(), rng.next_unit()};
    }
    const double fa = kde_at_point(samples, h, ax, ay);
    const double fb = kde_at_point(samples, h, bx, by);
    sa += fa;
    sb += fb;
    saa += fa * fa;
    sbb += fb * fb;
    sab += fa * fb;
  }
  const double ma = sa / reps, mb = sb / reps;
  const double va = saa / reps - ma * ma;
  const double vb = sbb / reps - mb * mb;
  const double cov = sab / reps - ma * mb;
  const double corr = cov / std::sqrt(va * vb);
  CHECK(std::abs(corr) < 0.05);
}
