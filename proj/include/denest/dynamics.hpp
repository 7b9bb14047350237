#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "denest/grid.hpp"

namespace denest {

using Vec2 = std::array<double, 2>;

// Time-dependent drift field v(x, y, t). axis_partials returns
// (dv1/dx, dv2/dy); when absent, consumers that need those derivatives
// fall back to central differencing with the given step.
struct VelocityField {
  std::function<Vec2(double, double, double)> value;
  std::function<Vec2(double, double, double)> axis_partials;
  double fd_step = 1e-6;

  Vec2 partials_or_fd(double x, double y, double t) const;
};

VelocityField zero_velocity();

// Isotropic noise of strength sigma on both axes. The density equation sees
// the derived coefficient sigma^2 / 2 on each diagonal.
struct DiffusionModel {
  double sigma = 0.0;

  double dcoef() const { return 0.5 * sigma * sigma; }
};

DiffusionModel make_diffusion(double sigma);

// Two equal-weight isotropic Gaussian bumps whose means rotate on a circle
// of radius 0.35 about the domain center with angular rate 0.2; the second
// bump trails the first by half a turn. The drift steers toward the mixture:
// v = dcoef_scale * grad(f) / f, with dcoef_scale == diffusion below.
struct MixtureScenario {
  double diffusion = 0.05;        // both the drift scale and the noise sigma
  double component_var = 0.015;   // per-axis variance of each bump
  double radius = 0.35;
  double angular_rate = 0.2;
  double center_x = 0.5;
  double center_y = 0.5;

  Vec2 mean1(double t) const;
  Vec2 mean2(double t) const;
  // Mixture density value (unit mass over the plane).
  double density(double x, double y, double t) const;
};

// Drift of the scenario at a point: v = diffusion * grad(f)/f. Well defined
// everywhere because the mixture is strictly positive.
Vec2 drift_eval(const MixtureScenario& sc, double x, double y, double t);

VelocityField scenario_velocity(const MixtureScenario& sc);

// n agents with positions confined to the grid rectangle. The stream seed
// plus a monotonically increasing step counter key every random draw, so
// trajectories depend only on (seed, agent index, step index).
struct AgentEnsemble {
  std::vector<Vec2> positions;
  double time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t steps_taken = 0;
};

// Uniform initial placement over the domain rectangle.
AgentEnsemble init_agents(int n, const Grid& g, std::uint64_t seed);

// One Euler-Maruyama step of dX = v dt + sigma dB per agent, followed by
// specular reflection (x -> 2*bound - x per axis, iterated) until the
// position is back inside the closed rectangle. Requires dt > 0.
void step_agents(AgentEnsemble& ens, const VelocityField& v, const DiffusionModel& d,
                 double dt, const Grid& g);

// Serial reference for the OpenMP agent loop; identical results by design.
void step_agents_serial(AgentEnsemble& ens, const VelocityField& v,
                        const DiffusionModel& d, double dt, const Grid& g);

}  // namespace denest
