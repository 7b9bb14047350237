#include "denest/rng.hpp"

#include <cmath>
#include <numbers>

namespace denest {

void StreamRng::next_normal_pair(double& z0, double& z1) {
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

}  // namespace denest
