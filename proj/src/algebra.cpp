#include "revpart/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace revpart {

namespace {

struct CertResiduals {
  double identity = 0.0;
  Eigen::VectorXd star;
  Eigen::MatrixXd product;  // pairwise
  double worst() const {
    double w = identity;
    if (star.size()) w = std::max(w, star.maxCoeff());
    if (product.size()) w = std::max(w, product.maxCoeff());
    return w;
  }
};

CertResiduals certification_residuals(const OperatorSubspace& space,
                                      const Qds& q) {
  CertResiduals r;
  const Eigen::Index k = space.dim();
  r.identity = space.membership_residual(CMat::Identity(q.dim(), q.dim()));
  r.star.resize(k);
  r.product.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    r.star(i) = space.membership_residual(space.basis[size_t(i)].adjoint());
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      r.product(i, j) = space.membership_residual(space.basis[size_t(i)] *
                                                  space.basis[size_t(j)]);
  return r;
}

OperatorSubspace drop_column(const OperatorSubspace& space, Eigen::Index col) {
  Eigen::MatrixXcd keep(space.coords.rows(), space.coords.cols() - 1);
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i < space.coords.cols(); ++i)
    if (i != col) keep.col(out++) = space.coords.col(i);
  return OperatorSubspace::from_coords(space.ip, std::move(keep));
}

OperatorSubspace channel_image(const Channel& c, const OperatorSubspace& s,
                               const Qds& q) {
  std::vector<CMat> imgs;
  imgs.reserve(s.basis.size());
  for (const auto& b : s.basis) imgs.push_back(c.apply(b));
  return orthonormalize(imgs, q.ip(), q.tol());
}

// Quadratic membership residual in the multiplicative domain of a map.
double quadratic_domain_residual(const Channel& c, const CMat& a) {
  CMat r1 = c.apply(a.adjoint() * a) - c.apply(a.adjoint()) * c.apply(a);
  CMat r2 = c.apply(a * a.adjoint()) - c.apply(a) * c.apply(a.adjoint());
  double scale = std::max(1.0, (a.adjoint() * a).norm());
  return std::max(r1.norm(), r2.norm()) / scale;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(
    const Eigen::VectorXd& sorted_vals, double split_tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= sorted_vals.size(); ++i) {
    if (i == sorted_vals.size() ||
        sorted_vals(i) - sorted_vals(i - 1) > split_tol) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

}  // namespace

SubAlgebra full_algebra(const Qds& q) {
  SubAlgebra a;
  a.space = OperatorSubspace::full(q.ip());
  a.certified = {true, true, true, 0.0};
  return a;
}

SubAlgebra trivial_algebra(const Qds& q) {
  SubAlgebra a;
  a.space = OperatorSubspace::from_coords(q.ip(), q.omega());
  a.certified = {true, true, true, 0.0};
  return a;
}

SubAlgebra certify_algebra(OperatorSubspace space, const Qds& q,
                           bool allow_shrink) {
  const double tol = q.tol().eq_tol;
  for (;;) {
    CertResiduals r = certification_residuals(space, q);
    double star_max = r.star.size() ? r.star.maxCoeff() : 0.0;
    double prod_max = r.product.size() ? r.product.maxCoeff() : 0.0;
    if (r.identity <= tol && star_max <= tol && prod_max <= tol) {
      SubAlgebra a;
      a.space = std::move(space);
      a.certified = {true, true, true, r.worst()};
      return a;
    }
    if (r.identity > tol)
      throw Error(ErrorKind::Internal,
                  "candidate subalgebra does not contain the identity",
                  r.identity);
    if (!allow_shrink)
      throw Error(ErrorKind::Internal,
                  "subspace is not closed as a *-algebra",
                  std::max(star_max, prod_max));
    // Greedy shrink: remove the basis vector carrying the worst violation.
    Eigen::Index worst_idx = 0;
    double worst_score = -1.0;
    for (Eigen::Index i = 0; i < space.dim(); ++i) {
      double score = r.star(i);
      for (Eigen::Index j = 0; j < space.dim(); ++j)
        score = std::max({score, r.product(i, j), r.product(j, i)});
      if (score > worst_score) {
        worst_score = score;
        worst_idx = i;
      }
    }
    if (space.dim() <= 1)
      throw Error(ErrorKind::Internal,
                  "certification shrink exhausted the candidate", worst_score);
    space = drop_column(space, worst_idx);
  }
}

SubAlgebra fixed_point_algebra(const Channel& t, const Qds& q) {
  if (t.dim != q.dim())
    throw Error(ErrorKind::DimensionMismatch, "map dimension mismatch");
  const double tol = q.tol().eq_tol;
  const Eigen::Index d = q.dim();

  CMat id = CMat::Identity(d, d);
  double unital = (t.superop * vec(id) - vec(id)).norm() / std::sqrt(double(d));
  if (unital > tol)
    throw Error(ErrorKind::PreconditionViolated, "map is not unital", unital);
  CVec vrho = vec(q.rho());
  double invariant = (t.superop.adjoint() * vrho - vrho).norm();
  if (invariant > tol)
    throw Error(ErrorKind::PreconditionViolated,
                "map does not preserve the state", invariant);

  CMat g = q.gns_matrix(t.superop);
  double herm = (g - g.adjoint()).norm() / std::max(1.0, g.norm());
  if (herm > tol)
    throw Error(ErrorKind::PreconditionViolated,
                "map is not self-phi-adjoint", herm);

  Eigen::MatrixXcd fixed =
      colspace::fixed_space_hermitian(hermitize(g), q.tol().rank_gap);
  return certify_algebra(OperatorSubspace::from_coords(q.ip(), fixed), q, true);
}

SubAlgebra multiplicative_domain(const Qds& q, int k) {
  if (k == 0) return full_algebra(q);
  SubAlgebra a = fixed_point_algebra(tau_k(q, k), q);
  // Definitional cross-check on the returned basis.
  Channel pk = phi_k(q, k);
  double worst = 0.0;
  for (const auto& b : a.basis())
    worst = std::max(worst, quadratic_domain_residual(pk, b));
  if (worst > 10.0 * q.tol().eq_tol)
    throw Error(ErrorKind::Internal,
                "fixed points of tau_k fail the multiplicative certificate",
                worst);
  return a;
}

// ---------------------------------------------------------------------------
// The decreasing chains
// ---------------------------------------------------------------------------

namespace {

// Candidate is invariant under the map and the map is multiplicative on it.
double forward_certificate_residual(const Channel& c, const SubAlgebra& a) {
  double worst = 0.0;
  for (const auto& b : a.basis()) {
    worst = std::max(worst, a.space.membership_residual(c.apply(b)));
    worst = std::max(worst, quadratic_domain_residual(c, b));
  }
  return worst;
}

}  // namespace

SubAlgebra d_infinity_plus(const Qds& q) {
  const int cap = int(q.dim() * q.dim());
  SubAlgebra a = multiplicative_domain(q, 1);
  double last_residual = 0.0;
  for (int n = 2; n <= cap + 1; ++n) {
    SubAlgebra dn = multiplicative_domain(q, n);
    OperatorSubspace meet = subspace_intersect(a.space, dn.space, q.tol());
    bool unchanged = meet.dim() == a.dim();
    a = certify_algebra(std::move(meet), q, false);
    if (unchanged) {
      last_residual = forward_certificate_residual(q.channel(), a);
      if (last_residual <= 10.0 * q.tol().eq_tol) return a;
    }
  }
  throw Error(ErrorKind::StabilizationFailure,
              "forward multiplicative domains did not stabilize",
              last_residual);
}

SubAlgebra multiplicative_core(const Qds& q) {
  const int cap = int(q.dim() * q.dim());
  SubAlgebra dplus = d_infinity_plus(q);
  OperatorSubspace image = dplus.space;
  OperatorSubspace candidate = dplus.space;
  double last_residual = 0.0;
  for (int n = 1; n <= cap + 1; ++n) {
    image = channel_image(q.channel(), image, q);
    OperatorSubspace meet = subspace_intersect(candidate, image, q.tol());
    bool unchanged = meet.dim() == candidate.dim();
    candidate = std::move(meet);
    if (unchanged) {
      OperatorSubspace forward = channel_image(q.channel(), candidate, q);
      last_residual = colspace::distance(forward.coords, candidate.coords);
      if (last_residual <= 10.0 * q.tol().eq_tol)
        return certify_algebra(candidate, q, false);
    }
  }
  throw Error(ErrorKind::StabilizationFailure,
              "image chain of the forward domain did not stabilize",
              last_residual);
}

DInfinityInfo d_infinity_info(const Qds& q) {
  const int cap = int(q.dim() * q.dim());
  DInfinityInfo info;
  SubAlgebra a = full_algebra(q);
  bool stabilized = false;
  double cert_residual = 0.0;

  for (int k = 1; k <= cap + 1; ++k) {
    SubAlgebra fwd = multiplicative_domain(q, k);
    SubAlgebra bwd = multiplicative_domain(q, -k);
    OperatorSubspace meet = subspace_intersect(
        subspace_intersect(a.space, fwd.space, q.tol()), bwd.space, q.tol());
    bool unchanged = meet.dim() == a.dim();
    a = certify_algebra(std::move(meet), q, false);
    info.dims_per_k.push_back(a.dim());
    if (unchanged) {
      // Automorphism certificate: the dynamics maps the candidate onto
      // itself and the adjoint inverts it there.
      OperatorSubspace forward = channel_image(q.channel(), a.space, q);
      double image_dist = colspace::distance(forward.coords, a.space.coords);
      double invert = 0.0;
      for (const auto& b : a.basis()) {
        CMat back = q.sharp().apply(q.channel().apply(b));
        invert = std::max(invert, q.ip().norm(back - b));
      }
      cert_residual = std::max(image_dist, invert);
      if (cert_residual <= 10.0 * q.tol().eq_tol) {
        info.k_stabilized = k;
        info.automorphism_residual = cert_residual;
        stabilized = true;
        break;
      }
    }
  }
  if (!stabilized)
    throw Error(ErrorKind::StabilizationFailure,
                "two-sided multiplicative domains did not stabilize",
                cert_residual);

  info.algebra = std::move(a);

  SubAlgebra core = multiplicative_core(q);
  info.core_distance = subspace_distance(info.algebra.space, core.space);
  if (info.core_distance > 100.0 * q.tol().eq_tol)
    throw Error(ErrorKind::CoreMismatch,
                "effective-observable algebra differs from the multiplicative core",
                info.core_distance);
  return info;
}

SubAlgebra d_infinity(const Qds& q) { return d_infinity_info(q).algebra; }

SubAlgebra peripheral_oracle(const Qds& q) {
  Eigen::ComplexEigenSolver<CMat> es(q.channel().superop);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Internal, "eigensolver failed on the superoperator");
  std::vector<CMat> peripheral;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) >= 1.0 - q.tol().rank_gap)
      peripheral.push_back(unvec(es.eigenvectors().col(i), q.dim(), q.dim()));
  OperatorSubspace span = orthonormalize(peripheral, q.ip(), q.tol());
  return certify_algebra(std::move(span), q, true);
}

OperatorSubspace perp_space(const SubAlgebra& r, const Qds& q) {
  const Eigen::Index n = q.dim() * q.dim();
  OperatorSubspace comp = OperatorSubspace::from_coords(
      q.ip(), colspace::complement(r.space.coords, n));
  double star = 0.0;
  for (const auto& b : comp.basis)
    star = std::max(star, comp.membership_residual(b.adjoint()));
  if (star > q.tol().eq_tol)
    throw Error(ErrorKind::Internal,
                "phi-orthogonal complement is not star-closed", star);
  return comp;
}

// ---------------------------------------------------------------------------
// Conditional expectations
// ---------------------------------------------------------------------------

CMat ConditionalExpectation::apply(const CMat& a) const {
  return unvec(superop * vec(a), dim, dim);
}

ConditionalExpectation conditional_expectation(const SubAlgebra& r,
                                               const Qds& q) {
  if (!r.certified.has_identity || !r.certified.star_closed ||
      !r.certified.product_closed)
    throw Error(ErrorKind::PreconditionViolated,
                "conditional expectation needs a certified algebra");
  const double tol = q.tol().eq_tol;
  ConditionalExpectation e;
  e.target = r;
  e.dim = q.dim();
  e.gns_projection = r.space.coords * r.space.coords.adjoint();
  e.superop = q.superop_from_gns(e.gns_projection);

  // Unit preservation and state preservation.
  CMat id = CMat::Identity(q.dim(), q.dim());
  double unital = q.ip().norm(e.apply(id) - id);
  double state = (e.gns_projection * q.omega() - q.omega()).norm();
  if (unital > tol || state > tol)
    throw Error(ErrorKind::ModularInvarianceFailure,
                "projection is not unital and state-preserving",
                std::max(unital, state));

  // Positivity of the projection as a map.
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(choi_from_superop(e.superop)));
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol * std::max(1.0, double(q.dim())))
    throw Error(ErrorKind::ModularInvarianceFailure,
                "projection onto the algebra is not positive; the algebra is "
                "not modular-invariant",
                -min_eig);

  // Module property E(x a y) = x E(a) y on basis triples.
  double worst = 0.0;
  for (const auto& x : r.basis())
    for (const auto& y : r.basis())
      for (Eigen::Index i = 0; i < q.dim(); ++i)
        for (Eigen::Index j = 0; j < q.dim(); ++j) {
          CMat a = basis_matrix(q.dim(), i, j);
          CMat lhs = e.apply(x * a * y);
          CMat rhs = x * e.apply(a) * y;
          worst = std::max(worst, (lhs - rhs).norm() /
                                      std::max(1.0, (x * a * y).norm()));
        }
  if (worst > tol)
    throw Error(ErrorKind::ModularInvarianceFailure,
                "bimodule property fails on the algebra", worst);
  return e;
}

ConditionalExpectation e_infinity(const Qds& q, const SubAlgebra& dinf) {
  ConditionalExpectation e = conditional_expectation(dinf, q);
  const double tol = q.tol().eq_tol;
  for (int k : {-2, -1, 1, 2}) {
    CMat sk = phi_k(q, k).superop;
    double comm = (sk * e.superop - e.superop * sk).norm() /
                  std::max(1.0, sk.norm());
    if (comm > tol)
      throw Error(ErrorKind::Internal,
                  "expectation does not commute with the dynamics", comm);
    // The orthogonal complement stays invariant.
    CMat uk = q.gns_matrix(sk);
    CMat p = e.gns_projection;
    CMat leak = p * uk * (CMat::Identity(p.rows(), p.cols()) - p);
    if (leak.norm() > tol * std::max(1.0, uk.norm()))
      throw Error(ErrorKind::Internal,
                  "complement is not invariant under the dynamics",
                  leak.norm());
  }
  return e;
}

ConditionalExpectation e_infinity(const Qds& q) {
  return e_infinity(q, d_infinity(q));
}

FlatElement decompose(const CMat& a, const ConditionalExpectation& e) {
  if (a.rows() != e.dim || a.cols() != e.dim)
    throw Error(ErrorKind::DimensionMismatch, "decompose argument size");
  FlatElement f;
  f.par = e.apply(a);
  f.perp = a - f.par;
  return f;
}

namespace {

void require_flat_compatible(const FlatElement& x,
                             const ConditionalExpectation& e, double tol) {
  if (x.par.rows() != e.dim || x.perp.rows() != e.dim)
    throw Error(ErrorKind::MismatchedExpectation,
                "flat element dimension differs from the expectation");
  double par_res = (e.apply(x.par) - x.par).norm() / std::max(1.0, x.par.norm());
  double perp_res = e.apply(x.perp).norm() / std::max(1.0, x.perp.norm());
  if (par_res > tol || perp_res > tol)
    throw Error(ErrorKind::MismatchedExpectation,
                "flat element was not decomposed by this expectation",
                std::max(par_res, perp_res));
}

}  // namespace

FlatElement flat_product(const FlatElement& x, const FlatElement& y,
                         const ConditionalExpectation& e) {
  double tol = 1e-6;
  require_flat_compatible(x, e, tol);
  require_flat_compatible(y, e, tol);
  CMat total = x.par * y.par + x.par * y.perp + x.perp * y.par;
  FlatElement f;
  f.par = x.par * y.par;
  f.perp = total - f.par;
  return f;
}

// ---------------------------------------------------------------------------
// Centers, blocks, and the abelian algebra
// ---------------------------------------------------------------------------

SubAlgebra center(const SubAlgebra& r, const Qds& q) {
  OperatorSubspace com = commutant(r.space.basis, q.ip(), q.tol());
  OperatorSubspace meet = subspace_intersect(r.space, com, q.tol());
  SubAlgebra z = certify_algebra(std::move(meet), q, false);
  double worst = 0.0;
  for (const auto& x : z.basis())
    for (const auto& y : z.basis())
      worst = std::max(worst, (x * y - y * x).norm());
  if (worst > q.tol().eq_tol)
    throw Error(ErrorKind::Internal, "center is not abelian", worst);
  return z;
}

namespace {

// Random Hermitian element of the algebra's span.
CMat random_hermitian_in(const SubAlgebra& r, Rng& rng) {
  CMat h = CMat::Zero(r.basis().front().rows(), r.basis().front().cols());
  for (const auto& b : r.basis()) h += rng.cgaussian() * b;
  return hermitize(h);
}

struct ClusterProjections {
  std::vector<CMat> projections;
  double min_gap = 0.0;
};

ClusterProjections spectral_clusters(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Eigen::VectorXd vals = es.eigenvalues();
  double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  auto ranges = cluster_ranges(vals, 1e-8 * scale);
  ClusterProjections out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c + 1 < ranges.size(); ++c)
    out.min_gap = std::min(out.min_gap,
                           vals(ranges[c + 1].first) - vals(ranges[c].second - 1));
  if (ranges.size() == 1) out.min_gap = std::numeric_limits<double>::infinity();
  for (auto [lo, hi] : ranges) {
    Eigen::MatrixXcd vs = es.eigenvectors().middleCols(lo, hi - lo);
    out.projections.push_back(vs * vs.adjoint());
  }
  return out;
}

Eigen::Index compressed_dimension(const SubAlgebra& r, const CMat& p,
                                  const Qds& q) {
  std::vector<CMat> cut;
  cut.reserve(r.basis().size());
  for (const auto& b : r.basis()) cut.push_back(p * b * p);
  return orthonormalize(cut, q.ip(), q.tol()).dim();
}

}  // namespace

CentralDecomposition central_decomposition(const SubAlgebra& r, const Qds& q,
                                           Rng& rng) {
  SubAlgebra z = center(r, q);
  double worst_gap = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    CMat h = random_hermitian_in(z, rng);
    ClusterProjections clusters = spectral_clusters(h);
    worst_gap = clusters.min_gap;
    if (clusters.projections.size() != size_t(z.dim())) continue;
    if (clusters.min_gap < 1e-4) continue;

    CentralDecomposition out;
    bool ok = true;
    Eigen::Index total = 0;
    for (const auto& p : clusters.projections) {
      if (r.space.membership_residual(p) > 100.0 * q.tol().eq_tol) {
        ok = false;
        break;
      }
      Eigen::Index dim_block = compressed_dimension(r, p, q);
      double root = std::sqrt(double(dim_block));
      int n = int(std::lround(root));
      if (std::abs(root - double(n)) > 1e-6 || n < 1) {
        ok = false;
        break;
      }
      out.projections.push_back(p);
      out.block_dims.push_back(n);
      total += dim_block;
    }
    if (!ok || total != r.dim()) continue;
    // Deterministic presentation: descending block size.
    std::sort(out.block_dims.begin(), out.block_dims.end(), std::greater<>());
    return out;
  }
  throw Error(ErrorKind::DegenerateRandomElement,
              "no separating central element after 5 draws", worst_gap);
}

std::vector<int> structure_report(const SubAlgebra& r, const Qds& q, Rng& rng) {
  return central_decomposition(r, q, rng).block_dims;
}

std::vector<int> structure_report(const SubAlgebra& r, const Qds& q) {
  Rng rng(0x57a7e);
  return structure_report(r, q, rng);
}

SubAlgebra abelian_effective(const Qds& q, const SubAlgebra& dinf, Rng& rng,
                             int samples) {
  SubAlgebra a = center(dinf, q);

  // Invariance of the abelian algebra under the dynamics.
  double inv = 0.0;
  for (const auto& b : a.basis())
    inv = std::max(inv, a.space.membership_residual(q.channel().apply(b)));
  if (inv > 10.0 * q.tol().eq_tol)
    throw Error(ErrorKind::Internal,
                "abelian effective algebra is not invariant", inv);

  // Sampled oracle: pure states of the reversible part are multiplicative on
  // the center. A generic Hermitian element of the algebra has minimal
  // spectral projections; vector states supported there restrict to pure
  // states of the algebra.
  int accepted = 0;
  int guard = 0;
  while (accepted < samples && guard < 20 * samples + 100) {
    ++guard;
    CMat h = random_hermitian_in(dinf, rng);
    ClusterProjections clusters = spectral_clusters(h);
    if (clusters.min_gap < 1e-4) continue;
    size_t pick = size_t(rng.uniform_int(0, int(clusters.projections.size()) - 1));
    const CMat& p = clusters.projections[pick];
    if (dinf.space.membership_residual(p) > 1e-6) continue;
    if (compressed_dimension(dinf, p, q) != 1) continue;  // not minimal

    CVec psi = p * rng.unit_vector(q.dim());
    double n = psi.norm();
    if (n < 1e-8) continue;
    psi /= n;
    auto omega = [&](const CMat& x) { return (psi.adjoint() * x * psi)(0, 0); };
    for (const auto& b : a.basis()) {
      Complex m1 = omega(b.adjoint() * b) - std::conj(omega(b)) * omega(b);
      Complex m2 = omega(b * b.adjoint()) - omega(b) * std::conj(omega(b));
      double resid = std::max(std::abs(m1), std::abs(m2));
      if (resid > 1e-7)
        throw Error(ErrorKind::Internal,
                    "center element is not in a sampled pure-state domain",
                    resid);
    }
    ++accepted;
  }
  if (accepted < samples)
    throw Error(ErrorKind::DegenerateRandomElement,
                "pure-state sampler starved", double(accepted));
  return a;
}

SubAlgebra abelian_effective(const Qds& q) {
  Rng rng(0xab311a);
  return abelian_effective(q, d_infinity(q), rng);
}

}  // namespace revpart
