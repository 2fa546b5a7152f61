#include "revpart/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace revpart {

namespace {

struct SpectralSummary {
  int peripheral_count = 0;
  double second_modulus = 0.0;
  Eigen::Index fixed_dim = 0;
};

SpectralSummary spectral_summary(const CMat& superop, double rank_gap) {
  SpectralSummary s;
  Eigen::ComplexEigenSolver<CMat> es(superop);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double mod = std::abs(es.eigenvalues()(i));
    if (mod >= 1.0 - rank_gap)
      ++s.peripheral_count;
    else
      s.second_modulus = std::max(s.second_modulus, mod);
  }
  CMat gap = superop - CMat::Identity(superop.rows(), superop.cols());
  s.fixed_dim = colspace::nullspace(gap, rank_gap, 1.0).cols();
  return s;
}

}  // namespace

Classification classify(const Qds& q, const SubAlgebra& dinf) {
  const double rank_gap = q.tol().rank_gap;
  Classification c;

  SpectralSummary s = spectral_summary(q.channel().superop, rank_gap);
  c.fixed_space_dim = int(s.fixed_dim);
  c.ergodic = s.fixed_dim == 1;
  c.mixing = s.peripheral_count == 1;
  c.weakly_mixing = c.mixing;
  c.weak_mixing_note =
      "reported equal to mixing: in finite dimensions the averaged absolute "
      "correlation criterion excludes the same peripheral spectrum";
  c.second_modulus = s.second_modulus;
  c.dim_d_infinity = int(dinf.dim());
  c.completely_irreversible = dinf.dim() == 1;

  // Same predicates from the restriction to the reversible part.
  const Eigen::MatrixXcd& basis = dinf.space.coords;
  CMat restricted =
      basis.adjoint() * q.gns_matrix(q.channel().superop) * basis;
  SpectralSummary rev = spectral_summary(restricted, rank_gap);
  bool ergodic_rev = rev.fixed_dim == 1;
  bool mixing_rev = rev.peripheral_count == 1;
  c.reversible_part_agrees = (ergodic_rev == c.ergodic) &&
                             (mixing_rev == c.mixing);

  // Asymptotic equilibrium: certified by trajectory decay against the
  // spectral bound when the reversible part is trivial.
  if (c.completely_irreversible) {
    const Eigen::Index d = q.dim();
    bool ok = true;
    for (Eigen::Index i = 0; i < d && ok; ++i)
      for (Eigen::Index j = 0; j < d && ok; ++j) {
        CMat a = basis_matrix(d, i, j);
        CMat limit = q.phi(a) * CMat::Identity(d, d);
        double scale = (a - limit).norm();
        CMat cur = a;
        for (int step = 1; step <= 50; ++step) {
          cur = q.channel().apply(cur);
          double bound = 10.0 * std::pow(c.second_modulus, step) * scale;
          double floor = 1e-11 * std::max(1.0, scale);
          if ((cur - limit).norm() > std::max(bound, floor)) {
            ok = false;
            break;
          }
        }
      }
    c.asymptotic_equilibrium = ok;
  }
  return c;
}

Classification classify(const Qds& q) { return classify(q, d_infinity(q)); }

Complex correlation_mean(const Qds& q, const CMat& a, const CMat& b, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidParams, "negative horizon");
  Complex mean = 0.0;
  Complex product = q.phi(a) * q.phi(b);
  CMat cur = b;
  for (int k = 0; k <= n; ++k) {
    mean += q.phi(a * cur) - product;
    if (k < n) cur = q.channel().apply(cur);
  }
  return mean / double(n + 1);
}

// ---------------------------------------------------------------------------
// Cesaro machinery
// ---------------------------------------------------------------------------

namespace {

double max_column_norm(const CMat& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    worst = std::max(worst, m.col(j).norm());
  return worst;
}

}  // namespace

CesaroResult cesaro_expectation(const Qds& q, int k, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "need at least one step");
  CesaroResult out{conditional_expectation(multiplicative_domain(q, k), q), 0.0};

  CMat g = q.gns_matrix(tau_k(q, k).superop);
  Eigen::Index m = g.rows();
  CMat term = CMat::Identity(m, m);
  CMat sum = CMat::Zero(m, m);
  for (int j = 0; j <= n; ++j) {
    sum += term;
    if (j < n) term = g * term;
  }
  sum /= double(n + 1);
  out.residual = max_column_norm(sum - out.e_k.gns_projection);
  return out;
}

ConditionalExpectation e_plus(const Qds& q) {
  ConditionalExpectation plus = conditional_expectation(d_infinity_plus(q), q);
  // The E_k family reaches the limit expectation within the stabilization
  // range.
  const int cap = int(q.dim() * q.dim());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cap; ++k) {
    ConditionalExpectation ek =
        conditional_expectation(multiplicative_domain(q, k), q);
    best = std::min(best, op_norm(ek.superop - plus.superop));
    if (best <= 10.0 * q.tol().eq_tol) return plus;
  }
  throw Error(ErrorKind::Internal,
              "E_k family did not reach the limit expectation", best);
}

ZMeanResult z_mean(const Qds& q, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "need at least one step");
  VLimits vl = v_limits(q);
  GnsOperator u = contraction(q);
  Eigen::Index m = u.matrix.rows();

  CMat fwd = CMat::Identity(m, m);
  CMat bwd = CMat::Identity(m, m);
  CMat sum = CMat::Identity(m, m);  // k = 0 term
  for (int k = 1; k <= n; ++k) {
    fwd = u.matrix.adjoint() * fwd * u.matrix;
    bwd = u.matrix * bwd * u.matrix.adjoint();
    sum += fwd + bwd;
  }
  CMat zn = sum / double(2 * n + 1);
  CMat zlim = 0.5 * (vl.v_plus.matrix + vl.v_minus.matrix);

  ZMeanResult out;
  out.superop = q.superop_from_gns(zn);
  out.cesaro_residual = op_norm(zn - zlim);

  SubAlgebra dinf = d_infinity(q);
  ConditionalExpectation einf = e_infinity(q, dinf);
  const CMat& p = einf.gns_projection;

  // Z fixes the reversible component and maps the complement into itself.
  CMat id = CMat::Identity(m, m);
  double fix = ((zlim * p) - p).norm();
  double leak = (p * zlim * (id - p)).norm();
  out.module_residual = std::max(fix, leak);

  // Strong decay: the dynamics is strictly contractive on the complement.
  bool strong = true;
  if (dinf.dim() < m) {
    Eigen::MatrixXcd comp = colspace::complement(dinf.space.coords, m);
    CMat g = q.gns_matrix(q.channel().superop);
    CMat restricted = comp.adjoint() * g * comp;
    Eigen::ComplexEigenSolver<CMat> es(restricted);
    double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    strong = radius < 1.0 - q.tol().rank_gap;
  }
  out.strong_decay = strong;
  out.limit_vs_e_infinity = op_norm(zlim - p);
  if (strong && out.limit_vs_e_infinity > 1e-6)
    throw Error(ErrorKind::Internal,
                "limit of the symmetric means differs from the expectation",
                out.limit_vs_e_infinity);
  return out;
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

EvolveResult evolve(const Qds& q, const CMat& a, int n, bool adjoint) {
  if (a.rows() != q.dim() || a.cols() != q.dim())
    throw Error(ErrorKind::DimensionMismatch, "evolve argument size");
  if (n < 0) throw Error(ErrorKind::InvalidParams, "negative horizon");

  const Channel& map = adjoint ? q.sharp() : q.channel();
  EvolveResult out;
  out.trajectory.reserve(size_t(n) + 1);
  out.trajectory.push_back(a);
  for (int step = 1; step <= n; ++step)
    out.trajectory.push_back(map.apply(out.trajectory.back()));

  SubAlgebra dinf = d_infinity(q);
  if (dinf.dim() == 1) {
    out.decay_checked = true;
    SpectralSummary s = spectral_summary(q.channel().superop, q.tol().rank_gap);
    CMat limit = q.phi(a) * CMat::Identity(q.dim(), q.dim());
    double scale = (a - limit).norm();
    double worst = 0.0;
    for (int step = 1; step <= n; ++step) {
      double resid = (out.trajectory[size_t(step)] - limit).norm();
      double bound = std::pow(s.second_modulus, step) * scale;
      double floor = 1e-11 * std::max(1.0, scale);
      if (resid > floor && bound > floor)
        worst = std::max(worst, resid / bound);
    }
    out.worst_ratio = worst;
    out.decay_ok = worst <= 10.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dilation verification
// ---------------------------------------------------------------------------

namespace {

CMat apply_superop(const CMat& s, const CMat& x, Eigen::Index out_dim) {
  return unvec(s * vec(x), out_dim, out_dim);
}

}  // namespace

DilationReport verify_dilation(const Qds& q, const DilationSpec& hat, int n) {
  const Eigen::Index d = q.dim();
  const Eigen::Index big = hat.hat_dim;
  const double tol = q.tol().eq_tol;

  if (hat.w.rows() != big || hat.w.cols() != big ||
      hat.rho_hat.rows() != big || hat.embed_superop.rows() != big * big ||
      hat.embed_superop.cols() != d * d ||
      hat.expect_superop.rows() != d * d ||
      hat.expect_superop.cols() != big * big)
    throw Error(ErrorKind::DimensionMismatch, "dilation data sizes disagree");

  double unitary_resid =
      (hat.w.adjoint() * hat.w - CMat::Identity(big, big)).norm();
  if (unitary_resid > tol * double(big))
    throw Error(ErrorKind::PreconditionViolated,
                "dilation dynamics is not a unitary conjugation",
                unitary_resid);

  auto embed = [&](const CMat& x) {
    return apply_superop(hat.embed_superop, x, big);
  };
  auto expect = [&](const CMat& x) {
    return apply_superop(hat.expect_superop, x, d);
  };
  auto hat_phi = [&](const CMat& x) {
    return CMat(hat.w.adjoint() * x * hat.w);
  };
  // User-frame action of the validated dynamics.
  auto phi_user = [&](const CMat& x) {
    return q.from_internal(q.channel().apply(q.to_internal(x)));
  };
  CMat rho_user = q.from_internal(q.rho());

  DilationReport rep;
  auto add = [&](const std::string& name, double resid, double bound) {
    rep.checks.push_back({name, resid, bound, resid <= bound});
  };

  // Unital *-monomorphism.
  CMat id_d = CMat::Identity(d, d);
  add("embed_unital", (embed(id_d) - CMat::Identity(big, big)).norm(), tol * 10);
  double mult = 0.0, star = 0.0;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    CMat x = unvec(CVec::Unit(d * d, i), d, d);
    star = std::max(star, (embed(x.adjoint()) - embed(x).adjoint()).norm());
    for (Eigen::Index j = 0; j < d * d; ++j) {
      CMat y = unvec(CVec::Unit(d * d, j), d, d);
      mult = std::max(mult, (embed(x * y) - embed(x) * embed(y)).norm());
    }
  }
  add("embed_multiplicative", mult, tol * 10);
  add("embed_star", star, tol * 10);
  Eigen::JacobiSVD<CMat> svd(hat.embed_superop);
  double inj = svd.singularValues()(svd.singularValues().size() - 1) /
               svd.singularValues()(0);
  // Residual is the missing share of the rank threshold; 0 when injective.
  add("embed_injective", std::max(0.0, q.tol().rank_gap - inj),
      0.5 * q.tol().rank_gap);

  // State compatibility.
  double state = 0.0;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    CMat x = unvec(CVec::Unit(d * d, i), d, d);
    Complex lhs = (hat.rho_hat * embed(x)).trace();
    Complex rhs = (rho_user * x).trace();
    state = std::max(state, std::abs(lhs - rhs));
  }
  add("state_compatible", state, tol * 10);

  // Dilation identity per step.
  for (int step = 1; step <= n; ++step) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d * d; ++i) {
      CMat x = unvec(CVec::Unit(d * d, i), d, d);
      CMat lifted = embed(x);
      CMat direct = x;
      for (int s = 0; s < step; ++s) {
        lifted = hat_phi(lifted);
        direct = phi_user(direct);
      }
      worst = std::max(worst, (expect(lifted) - direct).norm());
    }
    add("dilation_identity_n" + std::to_string(step), worst, tol * 100);
  }

  // Module identity E(i(a) X) = a E(X).
  double module = 0.0;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    CMat a = unvec(CVec::Unit(d * d, i), d, d);
    for (Eigen::Index j = 0; j < big * big; ++j) {
      CMat x = unvec(CVec::Unit(big * big, j), big, big);
      module = std::max(module, (expect(embed(a) * x) - a * expect(x)).norm());
    }
  }
  add("module_identity", module, tol * 100);

  // Biconditional: the hat dynamics intertwines the embedding exactly on the
  // multiplicative domain.
  SubAlgebra domain = multiplicative_domain(q, 1);
  double member_max = 0.0;
  double nonmember_min = std::numeric_limits<double>::infinity();
  int nonmembers = 0;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    CMat x_user = unvec(CVec::Unit(d * d, i), d, d);
    CMat x_int = q.to_internal(x_user);
    double proj = domain.space.membership_residual(x_int);
    double resid = (hat_phi(embed(x_user)) - embed(phi_user(x_user))).norm();
    if (proj <= 1e-3) {
      member_max = std::max(member_max, resid);
    } else if (proj >= 0.3) {
      ++nonmembers;
      nonmember_min = std::min(nonmember_min, resid);
    }
  }
  rep.member_max_residual = member_max;
  rep.nonmember_count = nonmembers;
  rep.nonmember_min_residual = nonmembers ? nonmember_min : 0.0;
  add("biconditional_on_domain", member_max, tol * 100);
  if (nonmembers)
    rep.checks.push_back({"biconditional_separation", nonmember_min,
                          10.0 * tol, nonmember_min > 10.0 * tol});

  rep.all_pass = true;
  for (const auto& line : rep.checks) rep.all_pass = rep.all_pass && line.pass;
  return rep;
}

}  // namespace revpart
