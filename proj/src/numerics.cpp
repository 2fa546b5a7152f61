#include "revpart/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace revpart {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotFaithful: return "NotFaithful";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::NotCP: return "NotCP";
    case ErrorKind::NotInvariantState: return "NotInvariantState";
    case ErrorKind::NoModularCommutation: return "NoModularCommutation";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::StabilizationFailure: return "StabilizationFailure";
    case ErrorKind::CoreMismatch: return "CoreMismatch";
    case ErrorKind::ModularInvarianceFailure: return "ModularInvarianceFailure";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::DegenerateRandomElement: return "DegenerateRandomElement";
    case ErrorKind::MismatchedExpectation: return "MismatchedExpectation";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, double residual)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      residual_(residual) {}

void Tolerance::check_valid() const {
  if (!(eq_tol > 0) || !(rank_gap > 0) || !(conv_tol > 0) || iter_max <= 0)
    throw Error(ErrorKind::InvalidParams, "tolerances must be strictly positive");
  if (!(eq_tol > conv_tol))
    throw Error(ErrorKind::InvalidParams, "eq_tol must exceed conv_tol");
}

// ---------------------------------------------------------------------------
// Dense helpers
// ---------------------------------------------------------------------------

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec vec(const CMat& x) {
  return Eigen::Map<const CVec>(x.data(), x.size());
}

CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw Error(ErrorKind::DimensionMismatch, "unvec size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat matrix_sqrt_psd(const CMat& h, double clip_tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h));
  Eigen::VectorXd vals = es.eigenvalues();
  double worst = vals.size() ? -vals.minCoeff() : 0.0;
  if (worst > clip_tol)
    throw Error(ErrorKind::NotContraction,
                "matrix is not positive semidefinite", worst);
  // Eigenvalues at the noise floor would blow up to sqrt(eps) in the root;
  // flatten them first.
  double floor = 1e-14 * std::max(1.0, vals.size() ? vals.maxCoeff() : 0.0);
  Eigen::VectorXd roots(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    roots(i) = vals(i) > floor ? std::sqrt(vals(i)) : 0.0;
  return es.eigenvectors() *
         roots.asDiagonal().toDenseMatrix().cast<Complex>() *
         es.eigenvectors().adjoint();
}

double op_norm(const CMat& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(x);
  return svd.singularValues()(0);
}

bool is_hermitian(const CMat& x, double tol) {
  return (x - x.adjoint()).norm() <= tol * std::max(1.0, x.norm());
}

CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

CMat basis_matrix(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMat m = CMat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

CMat identity(Eigen::Index d) { return CMat::Identity(d, d); }

// ---------------------------------------------------------------------------
// Inner products
// ---------------------------------------------------------------------------

namespace {

void require_density(const CMat& rho, const Tolerance& tol) {
  if (rho.rows() != rho.cols())
    throw Error(ErrorKind::DimensionMismatch, "state matrix is not square");
  if (!is_hermitian(rho, 1e3 * tol.conv_tol))
    throw Error(ErrorKind::NotFaithful, "state matrix is not Hermitian",
                (rho - rho.adjoint()).norm());
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(rho));
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > tol.rank_gap * hi))
    throw Error(ErrorKind::NotFaithful,
                "state is not positive definite at the working rank gap",
                lo / std::max(hi, 1e-300));
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e3 * tol.eq_tol)
    throw Error(ErrorKind::NotFaithful, "state trace differs from 1",
                std::abs(tr - 1.0));
}

}  // namespace

InnerProduct InnerProduct::hs(Eigen::Index d) {
  InnerProduct ip;
  ip.tag = HS;
  ip.dim = d;
  return ip;
}

InnerProduct InnerProduct::phi(const CMat& rho, const Tolerance& tol) {
  require_density(rho, tol);
  InnerProduct ip;
  ip.tag = Phi;
  ip.dim = rho.rows();
  ip.rho = rho;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(rho));
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  ip.rho_sqrt = es.eigenvectors() *
                roots.asDiagonal().toDenseMatrix().cast<Complex>() *
                es.eigenvectors().adjoint();
  ip.rho_isqrt = es.eigenvectors() *
                 roots.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() *
                 es.eigenvectors().adjoint();
  return ip;
}

CVec InnerProduct::coords(const CMat& x) const {
  if (x.rows() != dim || x.cols() != dim)
    throw Error(ErrorKind::DimensionMismatch, "coords dimension mismatch");
  if (tag == HS) return vec(x);
  return vec(x * rho_sqrt);
}

CMat InnerProduct::from_coords(const CVec& c) const {
  CMat m = unvec(c, dim, dim);
  if (tag == HS) return m;
  return m * rho_isqrt;
}

Complex InnerProduct::pair(const CMat& x, const CMat& y) const {
  if (tag == HS) return (x.adjoint() * y).trace();
  return (rho * x.adjoint() * y).trace();
}

double InnerProduct::norm(const CMat& x) const {
  return std::sqrt(std::max(0.0, pair(x, x).real()));
}

bool InnerProduct::compatible(const InnerProduct& other, double tol) const {
  if (tag != other.tag || dim != other.dim) return false;
  if (tag == HS) return true;
  return (rho - other.rho).norm() <= tol * std::max(1.0, rho.norm());
}

Complex phi_inner(const CMat& x, const CMat& y, const CMat& rho,
                  const Tolerance& tol) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows() ||
      x.rows() != rho.rows())
    throw Error(ErrorKind::DimensionMismatch,
                "phi_inner arguments must be square of equal dimension");
  require_density(rho, tol);
  return (rho * x.adjoint() * y).trace();
}

// ---------------------------------------------------------------------------
// Column-space primitives
// ---------------------------------------------------------------------------

namespace colspace {

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& cols, double rank_gap) {
  if (cols.cols() == 0) return Eigen::MatrixXcd(cols.rows(), 0);
  if (!cols.allFinite())
    throw Error(ErrorKind::InvalidParams, "non-finite entries in span data");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() ? rank_gap * sv(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXcd projector(const Eigen::MatrixXcd& basis) {
  return basis * basis.adjoint();
}

Eigen::MatrixXcd intersect(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                           double rank_gap) {
  if (a.rows() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "intersect ambient mismatch");
  if (a.cols() == 0 || b.cols() == 0) return Eigen::MatrixXcd(a.rows(), 0);

  Eigen::MatrixXcd sum = projector(a) + projector(b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum);

  // Loose spectral preselection, then a per-vector residual filter. The
  // residual of the top eigenvector at principal angle theta scales like
  // theta/2, so the cut sits at rank_gap/2.
  std::vector<Eigen::Index> cand;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) >= 2.0 - 1e-4) cand.push_back(i);
  if (cand.empty()) return Eigen::MatrixXcd(a.rows(), 0);

  Eigen::MatrixXcd pa = projector(a), pb = projector(b);
  Eigen::MatrixXcd keep(a.rows(), Eigen::Index(cand.size()));
  Eigen::Index k = 0;
  for (Eigen::Index i : cand) {
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    double ra = (v - pa * v).norm();
    double rb = (v - pb * v).norm();
    if (ra <= 0.5 * rank_gap && rb <= 0.5 * rank_gap) keep.col(k++) = v;
  }
  return orthonormalize(keep.leftCols(k), rank_gap);
}

Eigen::MatrixXcd complement(const Eigen::MatrixXcd& a, Eigen::Index ambient) {
  if (a.cols() == 0) return Eigen::MatrixXcd::Identity(ambient, ambient);
  Eigen::MatrixXcd p =
      Eigen::MatrixXcd::Identity(ambient, ambient) - projector(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
  Eigen::Index keep = ambient - a.cols();
  // Eigenvalues ascend; the complement sits at the top of the spectrum.
  return es.eigenvectors().rightCols(keep);
}

Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& m, double rank_gap,
                           double scale) {
  if (m.rows() == 0)
    return Eigen::MatrixXcd::Identity(m.cols(), m.cols());
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = std::max(sv.size() ? sv(0) : 0.0, scale);
  if (top == 0.0) return Eigen::MatrixXcd::Identity(m.cols(), m.cols());
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > rank_gap * top) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::MatrixXcd fixed_space_hermitian(const Eigen::MatrixXcd& h, double rank_gap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::Index lo = es.eigenvalues().size();
  while (lo > 0 && es.eigenvalues()(lo - 1) >= 1.0 - rank_gap) --lo;
  return es.eigenvectors().rightCols(es.eigenvalues().size() - lo);
}

double distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.cols() == 0 && b.cols() == 0) return 0.0;
  Eigen::Index n = std::max(a.rows(), b.rows());
  Eigen::MatrixXcd pa = a.cols() ? projector(a) : Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd pb = b.cols() ? projector(b) : Eigen::MatrixXcd::Zero(n, n);
  return op_norm(pa - pb);
}

double containment_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.cols() == 0) return 0.0;
  Eigen::MatrixXcd pb =
      b.cols() ? projector(b) : Eigen::MatrixXcd::Zero(a.rows(), a.rows());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    worst = std::max(worst, (a.col(i) - pb * a.col(i)).norm());
  return worst;
}

bool contains_vector(const Eigen::MatrixXcd& basis, const Eigen::VectorXcd& v,
                     double tol) {
  double n = v.norm();
  if (n == 0.0) return true;
  if (basis.cols() == 0) return false;
  return (v - projector(basis) * v).norm() <= tol * n;
}

}  // namespace colspace

// ---------------------------------------------------------------------------
// Operator subspaces
// ---------------------------------------------------------------------------

OperatorSubspace OperatorSubspace::from_coords(const InnerProduct& ip,
                                               Eigen::MatrixXcd coords) {
  OperatorSubspace s;
  s.ambient_dim = ip.dim;
  s.ip = ip;
  s.coords = std::move(coords);
  s.basis.reserve(size_t(s.coords.cols()));
  for (Eigen::Index i = 0; i < s.coords.cols(); ++i)
    s.basis.push_back(ip.from_coords(s.coords.col(i)));
  return s;
}

OperatorSubspace OperatorSubspace::zero(const InnerProduct& ip) {
  return from_coords(ip, Eigen::MatrixXcd(ip.dim * ip.dim, 0));
}

OperatorSubspace OperatorSubspace::full(const InnerProduct& ip) {
  return from_coords(
      ip, Eigen::MatrixXcd::Identity(ip.dim * ip.dim, ip.dim * ip.dim));
}

CMat OperatorSubspace::project(const CMat& x) const {
  CVec c = ip.coords(x);
  return ip.from_coords(coords * (coords.adjoint() * c));
}

double OperatorSubspace::membership_residual(const CMat& x) const {
  CVec c = ip.coords(x);
  CVec r = c - coords * (coords.adjoint() * c);
  return r.norm() / std::max(1.0, c.norm());
}

OperatorSubspace orthonormalize(const std::vector<CMat>& vectors,
                                const InnerProduct& ip, const Tolerance& tol) {
  Eigen::MatrixXcd cols(ip.dim * ip.dim, Eigen::Index(vectors.size()));
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (!vectors[i].allFinite())
      throw Error(ErrorKind::InvalidParams, "non-finite entries in span data");
    if (vectors[i].rows() != ip.dim || vectors[i].cols() != ip.dim)
      throw Error(ErrorKind::DimensionMismatch,
                  "span vectors must match the ambient dimension");
    cols.col(Eigen::Index(i)) = ip.coords(vectors[i]);
  }
  return OperatorSubspace::from_coords(
      ip, colspace::orthonormalize(cols, tol.rank_gap));
}

OperatorSubspace orthonormalize(const std::vector<CMat>& vectors,
                                const CMat& rho, const Tolerance& tol) {
  return orthonormalize(vectors, InnerProduct::phi(rho, tol), tol);
}

OperatorSubspace subspace_intersect(const OperatorSubspace& a,
                                    const OperatorSubspace& b,
                                    const Tolerance& tol) {
  if (a.ambient_dim != b.ambient_dim || !a.ip.compatible(b.ip, tol.eq_tol))
    throw Error(ErrorKind::DimensionMismatch,
                "intersection requires one ambient space and inner product");
  return OperatorSubspace::from_coords(
      a.ip, colspace::intersect(a.coords, b.coords, tol.rank_gap));
}

OperatorSubspace commutant(const std::vector<CMat>& s, const InnerProduct& ip,
                           const Tolerance& tol) {
  const Eigen::Index d = ip.dim;
  const Eigen::Index n = d * d;
  if (s.empty()) return OperatorSubspace::full(ip);

  Eigen::MatrixXcd stacked(n * Eigen::Index(s.size()), n);
  CMat id = CMat::Identity(d, d);
  double scale = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i].rows() != d || s[i].cols() != d)
      throw Error(ErrorKind::DimensionMismatch, "commutant generator size");
    scale = std::max(scale, s[i].norm());
    stacked.middleRows(Eigen::Index(i) * n, n) =
        kron(s[i].transpose(), id) - kron(id, s[i]);
  }
  Eigen::MatrixXcd null = colspace::nullspace(stacked, tol.rank_gap, scale);
  // Nullspace vectors are orthonormal for vec; re-express under ip.
  std::vector<CMat> mats;
  mats.reserve(size_t(null.cols()));
  for (Eigen::Index i = 0; i < null.cols(); ++i)
    mats.push_back(unvec(null.col(i), d, d));
  return orthonormalize(mats, ip, tol);
}

double subspace_distance(const OperatorSubspace& a, const OperatorSubspace& b) {
  return colspace::distance(a.coords, b.coords);
}

}  // namespace revpart
