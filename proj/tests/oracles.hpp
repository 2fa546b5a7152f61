#pragma once

// Test-only oracles, independent of the library's computation paths.
// Expected values in the suites are produced here (closed forms, hand
// derivations, brute-force linear algebra through different Eigen kernels)
// and frozen by the asserts.

#include "revpart/numerics.hpp"

#include <Eigen/LU>

#include <vector>

namespace oracles {

using revpart::CMat;
using revpart::Complex;
using revpart::CVec;

inline CMat e(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMat m = CMat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline CMat sigma_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMat sigma_y() {
  CMat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline CMat sigma_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Closed form for the dephasing channel: Phi^n(a) = p^n a + (1 - p^n) diag(a).
inline CMat dephasing_power(const CMat& a, double p, int n) {
  CMat diag = a.diagonal().asDiagonal();
  double pn = std::pow(p, n);
  return pn * a + (1.0 - pn) * diag;
}

// Time reversal of a row-stochastic chain: Phat_ij = pi_j P_ji / pi_i.
inline Eigen::MatrixXd reversed_chain(const Eigen::MatrixXd& p,
                                      const Eigen::VectorXd& pi) {
  Eigen::MatrixXd r(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) r(i, j) = pi(j) * p(j, i) / pi(i);
  return r;
}

// Fixed space of a superoperator via LU kernel extraction (the library uses
// SVD / Hermitian eigensolvers).
inline Eigen::MatrixXcd fixed_space_lu(const CMat& superop, double tol = 1e-9) {
  CMat m = superop - CMat::Identity(superop.rows(), superop.cols());
  Eigen::FullPivLU<CMat> lu(m);
  lu.setThreshold(tol);
  return lu.kernel();
}

// Direct quadratic membership residual in the multiplicative domain of a map
// given by its superoperator: max of ||Phi(a^*a) - Phi(a^*)Phi(a)|| and the
// adjoint-side version, Frobenius norms.
inline double multiplicative_residual(const CMat& superop, const CMat& a) {
  Eigen::Index d = a.rows();
  auto apply = [&](const CMat& x) {
    CVec v = Eigen::Map<const CVec>(x.data(), d * d);
    CVec w = superop * v;
    return CMat(Eigen::Map<const CMat>(w.data(), d, d));
  };
  CMat lhs1 = apply(a.adjoint() * a) - apply(a.adjoint()) * apply(a);
  CMat lhs2 = apply(a * a.adjoint()) - apply(a) * apply(a.adjoint());
  return std::max(lhs1.norm(), lhs2.norm());
}

// Geometric Cesaro sum (1/(N+1)) sum_{j=0}^{N} q^j.
inline double cesaro_geometric(double q, int n) {
  double s = 0.0, t = 1.0;
  for (int j = 0; j <= n; ++j) {
    s += t;
    t *= q;
  }
  return s / double(n + 1);
}

}  // namespace oracles
