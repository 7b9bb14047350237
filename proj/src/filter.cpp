#include "denest/filter.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace denest {

NoiseCovariance noise_covariance(const DensityField& p_meas, const NoiseScale& k) {
  if (!(k.kbar > 0.0)) throw std::invalid_argument("noise_covariance: kbar must be > 0");
  NoiseCovariance r;
  r.kbar = k.kbar;
  r.diag = k.kbar * p_meas.values.cwiseMax(kDensityFloor);
  return r;
}

CovarianceOperator identity_covariance(int n, double time) {
  CovarianceOperator p;
  p.matrix = DenseMat::Identity(n, n);
  p.time = time;
  return p;
}

FilterState init_filter(const DensityField& first_measurement) {
  FilterState s;
  s.estimate = first_measurement;
  s.covariance = identity_covariance(static_cast<int>(first_measurement.values.size()),
                                     first_measurement.time);
  return s;
}

DenseMat kalman_gain(const CovarianceOperator& p, const NoiseCovariance& r) {
  if (p.matrix.cols() != r.diag.size()) {
    throw std::invalid_argument("kalman_gain: covariance and noise dimensions differ");
  }
  DenseMat gain;
  scale_columns(p.matrix, r.diag.cwiseInverse(), gain);
  return gain;
}

void riccati_advance(const SparseMat& a, double max_abs_diag, const Eigen::VectorXd& r_diag,
                     DenseMat& p, double dt) {
  const int n = static_cast<int>(p.rows());
  if (a.rows() != n || a.cols() != n || r_diag.size() != n || p.cols() != n) {
    throw std::invalid_argument("riccati_advance: dimension mismatch");
  }
  if ((r_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("riccati_advance: noise diagonal must be positive");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("riccati_advance: dt must be > 0");

  // Each inner step splits the flow into two maps that cannot leave the
  // positive semidefinite cone: first P <- P - dt P R^-1 P, which acts on
  // the eigenvalues of R^-1/2 P R^-1/2 as mu <- mu (1 - dt mu) and stays
  // nonnegative while dt mu <= 1, then the congruence
  // P <- (I + dt A) P (I + dt A)^T. An unsplit Euler step mixes the two
  // and drifts out of the cone, after which the quadratic term amplifies
  // the negative directions instead of damping them.
  const Eigen::VectorXd inv_sqrt_r = r_diag.cwiseInverse().cwiseSqrt();
  DenseMat s(n, n), st(n, n), c(n, n), w(n, n), q(n, n);
  double remaining = dt;
  long steps = 0;
  while (remaining > 0.0) {
    // The quadratic bound needs dt * lambda_max(P R^-1) <= 0.9. The scaled
    // row-sum max_i sum_j |P_ij| / sqrt(r_i r_j) bounds that eigenvalue
    // from above; the diagonal alone would miss the mass that builds up
    // off-diagonal once transport correlates neighboring cells. The bound
    // shrinks as P contracts, so it is rechecked every inner step instead
    // of being frozen at its worst initial value. The transport bound uses
    // A_ii + A_jj, twice the single-operator diagonal.
    const double quad = ((p.cwiseAbs() * inv_sqrt_r.asDiagonal())
                             .rowwise()
                             .sum()
                             .cwiseProduct(inv_sqrt_r))
                            .maxCoeff();
    const double limit = std::max(2.0 * max_abs_diag, quad);
    double dt_inner = remaining;
    if (limit > 0.0) dt_inner = std::min(remaining, 0.9 / limit);

    scale_columns(p, inv_sqrt_r, w);
    q.triangularView<Eigen::Upper>().setZero();
    q.selfadjointView<Eigen::Upper>().rankUpdate(w);
    symmetric_subtract(p, q, dt_inner);

    spmm(a, p, s);
    st = s.transpose();
    spmm(a, st, c);  // A P A^T, since P is symmetric
    symmetric_congruence_update(p, s, c, dt_inner);

    remaining -= dt_inner;
    if (++steps > 100000000L) {
      throw std::runtime_error("riccati_advance: substepping failed to converge");
    }
  }
}

void riccati_step(CovarianceOperator& p, const FpOperator& a, const NoiseCovariance& r,
                  double dt) {
  riccati_advance(a.matrix, a.max_abs_diag, r.diag, p.matrix, dt);
  p.time += dt;
}

namespace {

// One splitting step of dp/dt = A p + L (y - p). The transport half goes
// through the same substepped explicit propagator that advances the
// reference solve, so a zero-gain filter replays the discrete transport
// exactly instead of accumulating a scheme mismatch against it. The
// measurement half then relaxes toward y with L and y frozen, implicitly
// because the floored noise on empty cells makes L arbitrarily stiff:
// (I + dt L) p_next = p_transported + dt L y. The relaxation leaves
// p_transported = y fixed, so an estimate that already agrees with a
// noiseless measurement is not disturbed.
void estimate_advance(const FpOperator& a, const DenseMat& gain, const Eigen::VectorXd& y,
                      DensityField& p, double dt) {
  predict(a, p, dt);
  DenseMat system = dt * gain;
  system.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<DenseMat> lu(system);
  p.values = lu.solve(p.values + dt * (gain * y));
}

void filter_cycle(FilterState& s, const FpOperator& a, const DensityField& y,
                  const NoiseCovariance& r, const FilterOptions& opt, double dt) {
  if (!y.grid.same_extent(a.grid) || !s.estimate.grid.same_extent(a.grid)) {
    throw std::invalid_argument("filter_step: grids do not match");
  }
  if (s.covariance.matrix.rows() != a.matrix.rows()) {
    throw std::invalid_argument("filter_step: covariance dimension does not match operator");
  }
  const DenseMat gain = kalman_gain(s.covariance, r);
  riccati_step(s.covariance, a, r, dt);
  estimate_advance(a, gain, y.values, s.estimate, dt);
  s.estimate.values = s.estimate.values.cwiseMax(0.0);
  if (opt.renormalize) {
    const double mass = integrate(s.estimate);
    if (!(mass > 0.0)) throw std::runtime_error("filter_step: cannot renormalize zero mass");
    s.estimate.values /= mass;
  }
}

}  // namespace

void filter_step(FilterState& s, const FpOperator& a, const DensityField& y,
                 const NoiseScale& k, double dt, const FilterOptions& opt) {
  filter_cycle(s, a, y, noise_covariance(y, k), opt, dt);
}

void oracle_filter_step(FilterState& s, const FpOperator& a, const DensityField& y,
                        const DensityField& p_true, const NoiseScale& k, double dt,
                        const FilterOptions& opt) {
  filter_cycle(s, a, y, noise_covariance(p_true, k), opt, dt);
}

}  // namespace denest
