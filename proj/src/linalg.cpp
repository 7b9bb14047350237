#include "denest/linalg.hpp"

#include <stdexcept>

namespace denest {

namespace {

template <bool kParallel>
void spmm_impl(const SparseMat& a, const DenseMat& p, DenseMat& out) {
  if (a.cols() != p.rows()) throw std::invalid_argument("spmm: dimension mismatch");
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(p.cols());
  out.resize(n, m);
  const auto* values = a.valuePtr();
  const auto* inner = a.innerIndexPtr();
  const auto* outer = a.outerIndexPtr();
#pragma omp parallel for schedule(static) if (kParallel)
  for (int r = 0; r < n; ++r) {
    auto row = out.row(r);
    row.setZero();
    for (auto idx = outer[r]; idx < outer[r + 1]; ++idx) {
      row += values[idx] * p.row(inner[idx]);
    }
  }
}

template <bool kParallel>
void scale_columns_impl(const DenseMat& p, const Eigen::VectorXd& s, DenseMat& out) {
  if (p.cols() != s.size()) throw std::invalid_argument("scale_columns: dimension mismatch");
  const int n = static_cast<int>(p.rows());
  out.resize(n, p.cols());
#pragma omp parallel for schedule(static) if (kParallel)
  for (int r = 0; r < n; ++r) {
    out.row(r) = p.row(r).cwiseProduct(s.transpose());
  }
}

template <bool kParallel>
void symmetric_subtract_impl(DenseMat& p, const DenseMat& q, double dt) {
  const int n = static_cast<int>(p.rows());
  if (p.cols() != n || q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("symmetric_subtract: matrices must be square and equal");
  }
  // Upper triangle plus mirror; only Q's upper triangle is read, so the
  // caller may fill Q with a rank update that touches one half.
#pragma omp parallel for schedule(static) if (kParallel)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double value = p(i, j) - dt * q(i, j);
      p(i, j) = value;
      p(j, i) = value;
    }
  }
}

template <bool kParallel>
void symmetric_congruence_update_impl(DenseMat& p, const DenseMat& s, const DenseMat& c,
                                      double dt) {
  const int n = static_cast<int>(p.rows());
  if (p.cols() != n || s.rows() != n || s.cols() != n || c.rows() != n || c.cols() != n) {
    throw std::invalid_argument(
        "symmetric_congruence_update: matrices must be square and equal");
  }
  const double dt2 = dt * dt;
#pragma omp parallel for schedule(static) if (kParallel)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double value = p(i, j) + dt * (s(i, j) + s(j, i)) + dt2 * c(i, j);
      p(i, j) = value;
      p(j, i) = value;
    }
  }
}

}  // namespace

void spmm(const SparseMat& a, const DenseMat& p, DenseMat& out) { spmm_impl<true>(a, p, out); }

void spmm_serial(const SparseMat& a, const DenseMat& p, DenseMat& out) {
  spmm_impl<false>(a, p, out);
}

void scale_columns(const DenseMat& p, const Eigen::VectorXd& s, DenseMat& out) {
  scale_columns_impl<true>(p, s, out);
}

void scale_columns_serial(const DenseMat& p, const Eigen::VectorXd& s, DenseMat& out) {
  scale_columns_impl<false>(p, s, out);
}

void symmetric_subtract(DenseMat& p, const DenseMat& q, double dt) {
  symmetric_subtract_impl<true>(p, q, dt);
}

void symmetric_subtract_serial(DenseMat& p, const DenseMat& q, double dt) {
  symmetric_subtract_impl<false>(p, q, dt);
}

void symmetric_congruence_update(DenseMat& p, const DenseMat& s, const DenseMat& c,
                                 double dt) {
  symmetric_congruence_update_impl<true>(p, s, c, dt);
}

void symmetric_congruence_update_serial(DenseMat& p, const DenseMat& s, const DenseMat& c,
                                        double dt) {
  symmetric_congruence_update_impl<false>(p, s, c, dt);
}

}  // namespace denest
