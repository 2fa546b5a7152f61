#include "revpart/gns.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace revpart {

GnsSpace gns_space(const Qds& q) {
  GnsSpace s;
  s.dim = q.dim() * q.dim();
  s.omega = q.omega();
  return s;
}

CMat gns_left_mult(const Qds& q, const CMat& a) {
  // Left multiplication commutes with the column weights, so the GNS matrix
  // coincides with the plain superoperator kron(I, a).
  return kron(CMat::Identity(q.dim(), q.dim()), a);
}

GnsOperator contraction(const Qds& q) {
  GnsOperator u;
  u.matrix = q.gns_matrix(q.channel().superop);
  u.tag = GnsTag::U;
  double norm = op_norm(u.matrix);
  if (norm > 1.0 + q.tol().eq_tol)
    throw Error(ErrorKind::Internal, "induced operator is not a contraction",
                norm - 1.0);
  return u;
}

GnsOperator u_k(const Qds& q, int k) {
  GnsOperator u = contraction(q);
  CMat base = u.matrix;
  if (k < 0) base = u.matrix.adjoint();
  int e = std::abs(k);
  CMat out = CMat::Identity(base.rows(), base.cols());
  while (e > 0) {
    if (e & 1) out = out * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return GnsOperator{std::move(out), GnsTag::Uk};
}

GnsOperator defect(const GnsOperator& t, const Tolerance& tol) {
  double norm = op_norm(t.matrix);
  if (norm > 1.0 + tol.eq_tol)
    throw Error(ErrorKind::NotContraction,
                "defect operator needs a contraction", norm - 1.0);
  Eigen::Index n = t.matrix.rows();
  CMat gap = CMat::Identity(n, n) - t.matrix.adjoint() * t.matrix;
  GnsOperator d{matrix_sqrt_psd(gap, 1e2 * tol.eq_tol), GnsTag::Defect};

  CMat gap_adj = CMat::Identity(n, n) - t.matrix * t.matrix.adjoint();
  CMat d_adj = matrix_sqrt_psd(gap_adj, 1e2 * tol.eq_tol);
  double twist = (t.matrix * d.matrix - d_adj * t.matrix).norm() /
                 std::max(1.0, t.matrix.norm());
  if (twist > 1e3 * tol.eq_tol)
    throw Error(ErrorKind::Internal, "defect intertwining identity fails", twist);
  return d;
}

// ---------------------------------------------------------------------------
// Strong limits
// ---------------------------------------------------------------------------

VLimits v_limits(const Qds& q) {
  const Tolerance& tol = q.tol();
  GnsOperator u = contraction(q);
  const CMat& m = u.matrix;
  Eigen::Index n = m.rows();

  CMat a = CMat::Identity(n, n);  // U^{*k} U^k
  CMat b = CMat::Identity(n, n);  // U^k U^{*k}
  double diff = 0.0;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= tol.iter_max; ++it) {
    CMat a2 = m.adjoint() * a * m;
    CMat b2 = m * b * m.adjoint();
    diff = std::max((a2 - a).norm(), (b2 - b).norm());
    a = std::move(a2);
    b = std::move(b2);
    if (diff < tol.conv_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(ErrorKind::ConvergenceFailure,
                "strong limits did not converge within iter_max", diff);

  VLimits out;
  out.v_minus = GnsOperator{std::move(a), GnsTag::VMinus};
  out.v_plus = GnsOperator{std::move(b), GnsTag::VPlus};
  out.iterations = it;
  out.residual = diff;

  // Defect-form identity on basis pairs, via the channel route at the
  // stopping power: phi(S_n(x,y)) = <x Omega, (I - U^{*n}U^n) y Omega>.
  const Eigen::Index d = q.dim();
  Channel fwd = phi_k(q, it);
  Channel bwd = phi_k(q, -it);
  const CMat& vm = out.v_minus.matrix;
  const CMat& vp = out.v_plus.matrix;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    CMat x = q.from_gns(CVec::Unit(d * d, i));
    CVec cx = q.gns(x);
    for (Eigen::Index j = 0; j < d * d; ++j) {
      CMat y = q.from_gns(CVec::Unit(d * d, j));
      CVec cy = q.gns(y);
      Complex fwd_form = q.phi(fwd.apply(x.adjoint() * y)) -
                         q.phi(fwd.apply(x.adjoint()) * fwd.apply(y));
      Complex fwd_inner = (cx.adjoint() * (cy - vm * cy))(0, 0);
      Complex bwd_form = q.phi(bwd.apply(x.adjoint() * y)) -
                         q.phi(bwd.apply(x.adjoint()) * bwd.apply(y));
      Complex bwd_inner = (cx.adjoint() * (cy - vp * cy))(0, 0);
      worst = std::max({worst, std::abs(fwd_form - fwd_inner),
                        std::abs(bwd_form - bwd_inner)});
    }
  }
  out.pairing_residual = worst;
  if (worst > 10.0 * tol.eq_tol)
    throw Error(ErrorKind::Internal,
                "limit form disagrees with the sesquilinear route", worst);
  return out;
}

// ---------------------------------------------------------------------------
// Unitary / completely-non-unitary splitting
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd h0_domains_raw(const Qds& q, int* k_stabilized) {
  const Eigen::Index n = q.dim() * q.dim();
  const int cap = int(n);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 1; k <= cap; ++k) {
    Eigen::MatrixXcd before = acc;
    acc = colspace::intersect(acc, multiplicative_domain(q, k).space.coords,
                              q.tol().rank_gap);
    acc = colspace::intersect(acc, multiplicative_domain(q, -k).space.coords,
                              q.tol().rank_gap);
    if (acc.cols() == before.cols()) {
      if (k_stabilized) *k_stabilized = k;
      return acc;
    }
  }
  throw Error(ErrorKind::StabilizationFailure,
              "domain closures did not stabilize");
}

}  // namespace

NagyFoias nagy_foias(const Qds& q) {
  const Tolerance& tol = q.tol();
  VLimits vl = v_limits(q);
  GnsOperator u = contraction(q);
  Eigen::Index n = u.matrix.rows();

  Eigen::MatrixXcd ker_minus =
      colspace::fixed_space_hermitian(hermitize(vl.v_minus.matrix), tol.rank_gap);
  Eigen::MatrixXcd ker_plus =
      colspace::fixed_space_hermitian(hermitize(vl.v_plus.matrix), tol.rank_gap);

  NagyFoias nf;
  nf.h0 = colspace::intersect(ker_plus, ker_minus, tol.rank_gap);
  nf.h1 = colspace::complement(nf.h0, n);

  // The two computations of the unitary-part space must agree; this is a
  // runtime self-check, not only a test.
  Eigen::MatrixXcd domains = h0_domains_raw(q, nullptr);
  nf.h0_agreement = colspace::distance(nf.h0, domains);
  if (nf.h0_agreement > 1e2 * tol.eq_tol)
    throw Error(ErrorKind::Internal,
                "unitary-part space routes disagree", nf.h0_agreement);

  CMat p0 = nf.h0.cols() ? colspace::projector(nf.h0) : CMat::Zero(n, n);
  CMat off = p0 * u.matrix * (CMat::Identity(n, n) - p0);
  CMat off2 = (CMat::Identity(n, n) - p0) * u.matrix * p0;
  nf.reducing_residual = std::max(off.norm(), off2.norm());

  nf.unitary_part = GnsOperator{nf.h0.adjoint() * u.matrix * nf.h0, GnsTag::U};
  nf.cnu_part = GnsOperator{nf.h1.adjoint() * u.matrix * nf.h1, GnsTag::U};

  if (nf.h0.cols()) {
    Eigen::JacobiSVD<CMat> svd(nf.unitary_part.matrix);
    nf.unitary_sv_deviation =
        (svd.singularValues().array() - 1.0).abs().maxCoeff();
  }

  // c.n.u. certificate: no unimodular eigenvector of the restriction is
  // isometric for both the operator and its adjoint.
  nf.cnu_certified = true;
  if (nf.h1.cols()) {
    Eigen::ComplexEigenSolver<CMat> es(nf.cnu_part.matrix);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i)) < 1.0 - 1e-6) continue;
      CVec v = es.eigenvectors().col(i).normalized();
      double iso_fwd = std::abs((nf.cnu_part.matrix * v).norm() - 1.0);
      double iso_bwd = std::abs((nf.cnu_part.matrix.adjoint() * v).norm() - 1.0);
      if (iso_fwd <= tol.eq_tol && iso_bwd <= tol.eq_tol) {
        nf.cnu_certified = false;
        break;
      }
    }
  }
  if (!nf.cnu_certified)
    throw Error(ErrorKind::Internal,
                "claimed c.n.u. part has a unitary reducing direction");
  return nf;
}

HInfinity h_infinity(const Qds& q, const SubAlgebra& dinf) {
  const Eigen::Index n = q.dim() * q.dim();
  HInfinity h;
  h.h_inf = dinf.space.coords;
  h.k_inf = colspace::complement(h.h_inf, n);
  CMat p = colspace::projector(h.h_inf);
  h.p_inf = GnsOperator{p, GnsTag::Projection};

  for (const auto& b : dinf.basis()) {
    CMat l = gns_left_mult(q, b);
    h.commutant_residual = std::max(
        h.commutant_residual, (p * l - l * p).norm() / std::max(1.0, l.norm()));
  }

  VLimits vl = v_limits(q);
  Eigen::MatrixXcd ker_minus = colspace::fixed_space_hermitian(
      hermitize(vl.v_minus.matrix), q.tol().rank_gap);
  Eigen::MatrixXcd ker_plus = colspace::fixed_space_hermitian(
      hermitize(vl.v_plus.matrix), q.tol().rank_gap);
  Eigen::MatrixXcd h0 =
      colspace::intersect(ker_plus, ker_minus, q.tol().rank_gap);
  h.h0_containment = colspace::containment_residual(h.h_inf, h0);
  return h;
}

HInfinity h_infinity(const Qds& q) { return h_infinity(q, d_infinity(q)); }

H0Domains h0_via_domains(const Qds& q) {
  H0Domains out;
  out.h0 = h0_domains_raw(q, &out.k_stabilized);

  NagyFoias nf = nagy_foias(q);
  double agreement = colspace::distance(out.h0, nf.h0);
  if (agreement > 1e2 * q.tol().eq_tol)
    throw Error(ErrorKind::Internal, "unitary-part space routes disagree",
                agreement);

  // Intertwining on the unitary-part space: U^k pi(a) xi = pi(Phi^k(a)) U^k xi.
  GnsOperator u = contraction(q);
  const Eigen::Index d = q.dim();
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    CMat uk = u_k(q, k).matrix;
    Channel pk = phi_k(q, k);
    for (Eigen::Index i = 0; i < d * d; ++i) {
      CMat a = q.from_gns(CVec::Unit(d * d, i));
      CMat lhs = uk * gns_left_mult(q, a);
      CMat rhs = gns_left_mult(q, pk.apply(a)) * uk;
      for (Eigen::Index c = 0; c < out.h0.cols(); ++c)
        worst = std::max(worst,
                         ((lhs - rhs) * out.h0.col(c)).norm() /
                             std::max(1.0, a.norm()));
    }
  }
  out.intertwining_residual = worst;
  if (worst > 1e2 * q.tol().eq_tol)
    throw Error(ErrorKind::Internal,
                "intertwining fails on the unitary-part space", worst);
  return out;
}

// ---------------------------------------------------------------------------
// Flat isometry
// ---------------------------------------------------------------------------

FlatIsometry flat_isometry(const Qds& q, const SubAlgebra& dinf,
                           const ConditionalExpectation& einf) {
  FlatIsometry out;
  const Eigen::MatrixXcd& basis = dinf.space.coords;
  CMat p = colspace::projector(basis);
  out.z = GnsOperator{p, GnsTag::FlatIsometry};

  // Z^* Z acts as the identity on the realized flat space.
  out.isometry_residual =
      (basis.adjoint() * p * basis -
       CMat::Identity(basis.cols(), basis.cols())).norm();

  // Z U_flat^n = Z U^n: push the class of a through the dynamics on both
  // sides, n <= 5. The left side goes through the channel and expectation,
  // the right side through GNS powers.
  GnsOperator u = contraction(q);
  const Eigen::Index d = q.dim();
  double worst = 0.0;
  CMat un = CMat::Identity(d * d, d * d);
  for (int n = 1; n <= 5; ++n) {
    un = un * u.matrix;
    Channel pn = phi_k(q, n);
    for (Eigen::Index i = 0; i < d * d; ++i) {
      CMat a = q.from_gns(CVec::Unit(d * d, i));
      CVec lhs = q.gns(einf.apply(pn.apply(a)));
      CVec rhs = un * q.gns(einf.apply(a));
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  out.intertwining_residual = worst;
  if (worst > 1e2 * q.tol().eq_tol)
    throw Error(ErrorKind::Internal, "flat isometry intertwining fails", worst);
  return out;
}

FlatIsometry flat_isometry(const Qds& q) {
  SubAlgebra dinf = d_infinity(q);
  return flat_isometry(q, dinf, e_infinity(q, dinf));
}

// ---------------------------------------------------------------------------
// Modular operators
// ---------------------------------------------------------------------------

ModularOps modular_ops(const Qds& q) {
  const Eigen::Index d = q.dim();
  const Eigen::Index n = d * d;
  const Eigen::VectorXd& r = q.rho_eigs();

  CMat rho_t_inv = r.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>();
  CMat rho = q.rho();
  CMat delta_superop = kron(rho_t_inv.transpose(), rho);

  ModularOps out;
  out.delta = GnsOperator{q.gns_matrix(delta_superop), GnsTag::ModularDelta};

  // Antilinear J as xi -> m conj(xi): columns are the images of the basis.
  CMat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    CMat b = q.from_gns(CVec::Unit(n, i));
    CMat jb(d, d);
    for (Eigen::Index row = 0; row < d; ++row)
      for (Eigen::Index col = 0; col < d; ++col)
        jb(row, col) =
            std::sqrt(r(row) / r(col)) * std::conj(b(col, row));
    m.col(i) = q.gns(jb);
  }
  out.j = GnsOperator{std::move(m), GnsTag::ModularJ};

  // Structural identities: J^2 = 1 and J Delta^{1/2} x Omega = x^* Omega.
  double j2 = (out.j.matrix * out.j.matrix.conjugate() - CMat::Identity(n, n))
                  .norm();
  if (j2 > 1e-9 * double(n))
    throw Error(ErrorKind::Internal, "modular conjugation is not involutive", j2);
  CMat delta_half = matrix_sqrt_psd(hermitize(out.delta.matrix), 1e-9);
  double s_resid = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    CMat b = q.from_gns(CVec::Unit(n, i));
    CVec lhs = out.j.matrix * (delta_half * q.gns(b)).conjugate();
    CVec rhs = q.gns(b.adjoint());
    s_resid = std::max(s_resid, (lhs - rhs).norm());
  }
  if (s_resid > 1e-8 * double(n))
    throw Error(ErrorKind::Internal, "polar identity of the modular data fails",
                s_resid);

  GnsOperator u = contraction(q);
  out.u_delta_commutator =
      (u.matrix * out.delta.matrix - out.delta.matrix * u.matrix).norm() /
      std::max(1.0, out.delta.matrix.norm());
  out.u_j_commutator =
      (u.matrix * out.j.matrix - out.j.matrix * u.matrix.conjugate()).norm() /
      std::max(1.0, u.matrix.norm());
  return out;
}

}  // namespace revpart
