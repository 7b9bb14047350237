#pragma once

#include "denest/fpops.hpp"
#include "denest/grid.hpp"
#include "denest/kde.hpp"
#include "denest/linalg.hpp"

namespace denest {

// Densities entering an inverse noise covariance are floored at this value;
// a sample-starved cell would otherwise produce an unbounded gain.
inline constexpr double kDensityFloor = 1e-8;

// Diagonal measurement-noise covariance R = kbar * diag(max(p, floor)).
struct NoiseCovariance {
  Eigen::VectorXd diag;
  double kbar = 0.0;
};

NoiseCovariance noise_covariance(const DensityField& p_meas, const NoiseScale& k);

// Dense estimation-error covariance, kept symmetric by construction.
struct CovarianceOperator {
  DenseMat matrix;
  double time = 0.0;
};

CovarianceOperator identity_covariance(int n, double time = 0.0);

struct FilterState {
  DensityField estimate;
  CovarianceOperator covariance;
};

// Estimate starts at the first measurement, covariance at the identity.
FilterState init_filter(const DensityField& first_measurement);

// L = P * R^{-1} (diagonal R, so a column scaling of P).
DenseMat kalman_gain(const CovarianceOperator& p, const NoiseCovariance& r);

// First-order splitting of dP/dt = A P + P A^T - P R^{-1} P. Per inner step
// the quadratic part P <- P - dt P R^{-1} P is applied first, then the
// transport as the congruence (I + dt A) P (I + dt A)^T; both maps keep P in
// the positive semidefinite cone, which an unsplit Euler step does not. The
// inner step obeys dt_inner * 2 max|diag(A)| <= 0.9 (the operator acts on
// both sides, doubling the effective diagonal) together with
// dt_inner * B <= 0.9, where B = max_i sum_j |P_ij| / sqrt(r_i r_j) bounds
// lambda_max(P R^{-1}) from above. Larger dt is split automatically,
// rechecking the second bound as P contracts so the startup transient does
// not force a worst-case step count on the whole interval.
void riccati_step(CovarianceOperator& p, const FpOperator& a, const NoiseCovariance& r,
                  double dt);

// Core on raw types, exposed for scalar and small-system checks.
void riccati_advance(const SparseMat& a, double max_abs_diag, const Eigen::VectorXd& r_diag,
                     DenseMat& p, double dt);

struct FilterOptions {
  bool renormalize = false;  // rescale the estimate to unit mass after clamping
};

// One measurement-update cycle over dt, in fixed order: build R from y,
// take the gain from the covariance at the step start, advance the
// covariance, transport the estimate with the same substepped propagator
// the reference solve uses, relax it toward y through the frozen gain
// (implicitly, since floored noise makes the gain stiff), clamp the
// estimate at zero, then optionally renormalize. y is the measurement taken
// at the end of the interval, t + dt: the cycle predicts across the step
// and then corrects against the current measurement.
void filter_step(FilterState& s, const FpOperator& a, const DensityField& y,
                 const NoiseScale& k, double dt, const FilterOptions& opt = {});

// Same cycle but the noise model is built from the true density instead of
// the measurement; the innovation still uses y. Reference variant for
// quantifying what the measurement-driven noise model costs.
void oracle_filter_step(FilterState& s, const FpOperator& a, const DensityField& y,
                        const DensityField& p_true, const NoiseScale& k, double dt,
                        const FilterOptions& opt = {});

}  // namespace denest
