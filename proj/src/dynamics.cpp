#include "denest/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "denest/rng.hpp"

namespace denest {

Vec2 VelocityField::partials_or_fd(double x, double y, double t) const {
  if (axis_partials) return axis_partials(x, y, t);
  const double h = fd_step;
  const Vec2 xp = value(x + h, y, t);
  const Vec2 xm = value(x - h, y, t);
  const Vec2 yp = value(x, y + h, t);
  const Vec2 ym = value(x, y - h, t);
  return {(xp[0] - xm[0]) / (2.0 * h), (yp[1] - ym[1]) / (2.0 * h)};
}

VelocityField zero_velocity() {
  VelocityField v;
  v.value = [](double, double, double) -> Vec2 { return {0.0, 0.0}; };
  v.axis_partials = [](double, double, double) -> Vec2 { return {0.0, 0.0}; };
  return v;
}

DiffusionModel make_diffusion(double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("make_diffusion: sigma must be >= 0");
  return DiffusionModel{sigma};
}

Vec2 MixtureScenario::mean1(double t) const {
  return {center_x + radius * std::cos(angular_rate * t),
          center_y + radius * std::sin(angular_rate * t)};
}

Vec2 MixtureScenario::mean2(double t) const {
  const double a = angular_rate * t + std::numbers::pi;
  return {center_x + radius * std::cos(a), center_y + radius * std::sin(a)};
}

namespace {

struct MixtureParts {
  double w1, w2;      // responsibilities of the two bumps
  double d1x, d1y;    // x - mean1
  double d2x, d2y;    // x - mean2
  double density;
};

MixtureParts eval_parts(const MixtureScenario& sc, double x, double y, double t) {
  const Vec2 m1 = sc.mean1(t);
  const Vec2 m2 = sc.mean2(t);
  MixtureParts p;
  p.d1x = x - m1[0];
  p.d1y = y - m1[1];
  p.d2x = x - m2[0];
  p.d2y = y - m2[1];
  const double inv2v = 1.0 / (2.0 * sc.component_var);
  const double e1 = -(p.d1x * p.d1x + p.d1y * p.d1y) * inv2v;
  const double e2 = -(p.d2x * p.d2x + p.d2y * p.d2y) * inv2v;
  // Factor out the larger exponent so the responsibilities stay finite far
  // from both bumps.
  const double emax = std::max(e1, e2);
  const double a1 = std::exp(e1 - emax);
  const double a2 = std::exp(e2 - emax);
  p.w1 = a1 / (a1 + a2);
  p.w2 = a2 / (a1 + a2);
  const double norm = 1.0 / (2.0 * std::numbers::pi * sc.component_var);
  p.density = 0.5 * norm * (std::exp(e1) + std::exp(e2));
  return p;
}

}  // namespace

double MixtureScenario::density(double x, double y, double t) const {
  return eval_parts(*this, x, y, t).density;
}

Vec2 drift_eval(const MixtureScenario& sc, double x, double y, double t) {
  const MixtureParts p = eval_parts(sc, x, y, t);
  const double scale = -sc.diffusion / sc.component_var;
  return {scale * (p.w1 * p.d1x + p.w2 * p.d2x), scale * (p.w1 * p.d1y + p.w2 * p.d2y)};
}

VelocityField scenario_velocity(const MixtureScenario& sc) {
  VelocityField v;
  v.value = [sc](double x, double y, double t) { return drift_eval(sc, x, y, t); };
  v.axis_partials = [sc](double x, double y, double t) -> Vec2 {
    // d(v1)/dx = -(D/s2) * (1 - w1*w2*(m1x-m2x)^2/s2), same pattern in y.
    const MixtureParts p = eval_parts(sc, x, y, t);
    const Vec2 m1 = sc.mean1(t);
    const Vec2 m2 = sc.mean2(t);
    const double s2 = sc.component_var;
    const double dmx = m1[0] - m2[0];
    const double dmy = m1[1] - m2[1];
    const double c = -sc.diffusion / s2;
    return {c * (1.0 - p.w1 * p.w2 * dmx * dmx / s2),
            c * (1.0 - p.w1 * p.w2 * dmy * dmy / s2)};
  };
  return v;
}

AgentEnsemble init_agents(int n, const Grid& g, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("init_agents: n must be >= 1");
  AgentEnsemble ens;
  ens.positions.resize(n);
  ens.seed = seed;
  // Step counter 0 is reserved for placement; stepping starts at 1.
  for (int i = 0; i < n; ++i) {
    StreamRng rng(seed, static_cast<std::uint64_t>(i), 0);
    const double ux = rng.next_unit();
    const double uy = rng.next_unit();
    ens.positions[i] = {g.xmin + ux * (g.xmax - g.xmin), g.ymin + uy * (g.ymax - g.ymin)};
  }
  return ens;
}

namespace {

// Iterated specular reflection into [lo, hi]. Returns false only for
// excursions so large that the fold fails to settle (non-finite input or a
// blown-up step); the caller turns that into an error outside the parallel
// region, since throwing from inside one is not allowed.
bool reflect_axis(double& x, double lo, double hi) {
  int guard = 0;
  while (x < lo || x > hi) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
    if (++guard > 10000) return false;
  }
  return std::isfinite(x);
}

template <bool kParallel>
void step_agents_impl(AgentEnsemble& ens, const VelocityField& v, const DiffusionModel& d,
                      double dt, const Grid& g) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_agents: dt must be > 0");
  if (!v.value) throw std::invalid_argument("step_agents: velocity field is empty");
  const std::uint64_t counter = ens.steps_taken + 1;
  const double t = ens.time;
  const double root_dt = std::sqrt(dt);
  const int n = static_cast<int>(ens.positions.size());
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok) if (kParallel)
  for (int i = 0; i < n; ++i) {
    StreamRng rng(ens.seed, static_cast<std::uint64_t>(i), counter);
    double z0, z1;
    rng.next_normal_pair(z0, z1);
    Vec2& p = ens.positions[i];
    const Vec2 vel = v.value(p[0], p[1], t);
    double x = p[0] + vel[0] * dt + d.sigma * root_dt * z0;
    double y = p[1] + vel[1] * dt + d.sigma * root_dt * z1;
    ok = ok && reflect_axis(x, g.xmin, g.xmax) && reflect_axis(y, g.ymin, g.ymax);
    p[0] = x;
    p[1] = y;
  }
  if (!ok) throw std::runtime_error("step_agents: reflection did not settle (blown-up step?)");
  ens.time += dt;
  ens.steps_taken = counter;
}

}  // namespace

void step_agents(AgentEnsemble& ens, const VelocityField& v, const DiffusionModel& d,
                 double dt, const Grid& g) {
  step_agents_impl<true>(ens, v, d, dt, g);
}

void step_agents_serial(AgentEnsemble& ens, const VelocityField& v, const DiffusionModel& d,
                        double dt, const Grid& g) {
  step_agents_impl<false>(ens, v, d, dt, g);
}

}  // namespace denest
