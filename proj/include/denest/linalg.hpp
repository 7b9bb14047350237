#pragma once

#include <Eigen/Core>

#include "denest/fpops.hpp"

namespace denest {

// Row-major dense storage so sparse-row times dense-row products and the
// symmetric updates below stream through memory.
using DenseMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// out = A * P, parallel over the rows of A. Each output row is accumulated
// in a fixed order, so results do not depend on the thread count.
void spmm(const SparseMat& a, const DenseMat& p, DenseMat& out);
void spmm_serial(const SparseMat& a, const DenseMat& p, DenseMat& out);

// out = P * diag(s).
void scale_columns(const DenseMat& p, const Eigen::VectorXd& s, DenseMat& out);
void scale_columns_serial(const DenseMat& p, const Eigen::VectorXd& s, DenseMat& out);

// P <- P - dt * Q, written symmetrically from the upper triangle. Only Q's
// upper half is read, so a one-sided rank update is a valid way to produce
// it; the result is exactly symmetric by construction.
void symmetric_subtract(DenseMat& p, const DenseMat& q, double dt);
void symmetric_subtract_serial(DenseMat& p, const DenseMat& q, double dt);

// P <- P + dt * (S + S^T) + dt^2 * C, i.e. the congruence
// (I + dt A) P (I + dt A)^T expanded with S = A P and C = A P A^T. Only C's
// upper half is read; the result is exactly symmetric.
void symmetric_congruence_update(DenseMat& p, const DenseMat& s, const DenseMat& c,
                                 double dt);
void symmetric_congruence_update_serial(DenseMat& p, const DenseMat& s, const DenseMat& c,
                                        double dt);

}  // namespace denest
