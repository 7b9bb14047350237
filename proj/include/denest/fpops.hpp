#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>

#include "denest/dynamics.hpp"
#include "denest/grid.hpp"

namespace denest {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Discrete generator of the density transport equation
//
//   dp/dt = -div(v p) + d11 d^2p/dx^2 + d22 d^2p/dy^2
//
// on the cell-centered grid, in flux form with zero total flux through the
// domain boundary. Interior faces carry
//
//   F = v_face * p_upwind - d_axis * (p_high - p_low) / spacing,
//
// so every face contributes an equal and opposite pair of entries and the
// column sums of the matrix telescope to zero: forward Euler steps preserve
// total mass exactly. Off-diagonal entries are nonnegative (upwinding plus
// centered diffusion), which also makes explicit steps positivity-preserving
// whenever dt * |diagonal| <= 1.
struct FpOperator {
  SparseMat matrix;
  Grid grid;
  double time = 0.0;
  double max_abs_diag = 0.0;
};

// Per-axis diffusion coefficients. A cross term is representable but the
// five-point assembly cannot honor it; assembly rejects nonzero d12.
struct DiffusionTensor {
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

FpOperator assemble_operator(const Grid& g, const VelocityField& v,
                             const DiffusionTensor& d, double t);

// Isotropic convenience: both axes get the model's sigma^2/2.
FpOperator assemble_operator(const Grid& g, const VelocityField& v,
                             const DiffusionModel& d, double t);

// y = A p. Throws if the field's grid does not match the operator's.
Eigen::VectorXd apply_operator(const FpOperator& op, const DensityField& p);
Eigen::VectorXd apply_operator_serial(const FpOperator& op, const DensityField& p);

// Smallest substep count m such that (dt/m) * max|diag(A)| <= 0.9, and the
// resulting inner step. m is at least 1.
struct SubstepPlan {
  int count = 1;
  double dt_inner = 0.0;
};

SubstepPlan stable_substep(const FpOperator& op, double dt);

// Advance p by dt with forward Euler at the stable inner step. The operator
// is held fixed over the substeps; callers reassemble per outer step when v
// is time dependent.
void predict(const FpOperator& op, DensityField& p, double dt);

// Entries as "row col value" lines, row-major order, full precision.
void dump_coo(const FpOperator& op, std::ostream& os);

}  // namespace denest
