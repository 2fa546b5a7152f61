#include "revpart/qds.hpp"

#include "revpart/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace revpart {

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

Channel Channel::from_kraus(std::vector<CMat> ks) {
  if (ks.empty())
    throw Error(ErrorKind::InvalidParams, "empty Kraus list");
  Channel c;
  c.dim = ks.front().rows();
  for (const auto& k : ks)
    if (k.rows() != c.dim || k.cols() != c.dim)
      throw Error(ErrorKind::DimensionMismatch, "Kraus operator size");
  c.superop = CMat::Zero(c.dim * c.dim, c.dim * c.dim);
  for (const auto& k : ks)
    c.superop += kron(k.transpose(), k.adjoint());
  c.kraus = std::move(ks);
  return c;
}

Channel Channel::from_superop(CMat s) {
  Channel c;
  Eigen::Index n = s.rows();
  Eigen::Index d = Eigen::Index(std::llround(std::sqrt(double(n))));
  if (s.cols() != n || d * d != n)
    throw Error(ErrorKind::DimensionMismatch,
                "superoperator must be d^2 x d^2");
  c.dim = d;
  c.superop = std::move(s);
  return c;
}

Channel Channel::identity_channel(Eigen::Index d) {
  Channel c;
  c.dim = d;
  c.kraus = {CMat::Identity(d, d)};
  c.superop = CMat::Identity(d * d, d * d);
  return c;
}

CMat Channel::apply(const CMat& a) const {
  if (a.rows() != dim || a.cols() != dim)
    throw Error(ErrorKind::DimensionMismatch, "channel argument size");
  return unvec(superop * vec(a), dim, dim);
}

Channel Channel::compose(const Channel& rhs) const {
  if (dim != rhs.dim)
    throw Error(ErrorKind::DimensionMismatch, "channel composition size");
  Channel c;
  c.dim = dim;
  c.superop = superop * rhs.superop;
  return c;
}

Channel Channel::power(int n) const {
  if (n < 0) throw Error(ErrorKind::InvalidParams, "negative channel power");
  Channel out = identity_channel(dim);
  out.kraus.clear();
  CMat base = superop;
  unsigned int e = static_cast<unsigned int>(n);
  while (e > 0) {
    if (e & 1u) out.superop = out.superop * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return out;
}

CMat choi_from_superop(const CMat& s) {
  Eigen::Index d = Eigen::Index(std::llround(std::sqrt(double(s.rows()))));
  CMat c(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index q = 0; q < d; ++q)
        for (Eigen::Index r = 0; r < d; ++r)
          c(i * d + q, j * d + r) = s(q + r * d, i + j * d);
  return c;
}

CMat Channel::choi() const { return choi_from_superop(superop); }

CMat trace_dual_superop(const CMat& s) {
  Eigen::Index d = Eigen::Index(std::llround(std::sqrt(double(s.rows()))));
  // Commutation matrix: P vec(x) = vec(x^T).
  CMat p = CMat::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) p(i + j * d, j + i * d) = 1.0;
  return p * s.transpose() * p;
}

// ---------------------------------------------------------------------------
// SystemState
// ---------------------------------------------------------------------------

SystemState SystemState::from_density(const CMat& rho, const Tolerance& tol) {
  tol.check_valid();
  if (rho.rows() != rho.cols())
    throw Error(ErrorKind::DimensionMismatch, "state matrix is not square");
  if ((rho - rho.adjoint()).norm() > 1e3 * tol.conv_tol * std::max(1.0, rho.norm()))
    throw Error(ErrorKind::NotFaithful, "state matrix is not Hermitian",
                (rho - rho.adjoint()).norm());
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e3 * tol.eq_tol)
    throw Error(ErrorKind::NotFaithful, "state trace differs from 1",
                std::abs(tr - 1.0));

  SystemState st;
  st.rho = hermitize(rho);
  Eigen::Index d = rho.rows();

  double offdiag = (st.rho - CMat(st.rho.diagonal().asDiagonal())).norm();
  if (offdiag <= 1e-14 * std::max(1.0, st.rho.norm())) {
    // Keep the user's ordering when the state is already diagonal.
    st.diagonal_input = true;
    st.eigvals = st.rho.diagonal().real();
    st.eigvecs = CMat::Identity(d, d);
  } else {
    Eigen::SelfAdjointEigenSolver<CMat> es(st.rho);
    // Descending for a deterministic frame.
    st.eigvals = es.eigenvalues().reverse();
    st.eigvecs = es.eigenvectors().rowwise().reverse();
  }
  double lo = st.eigvals.minCoeff();
  double hi = st.eigvals.maxCoeff();
  if (!(lo > tol.rank_gap * hi))
    throw Error(ErrorKind::NotFaithful,
                "state is not positive definite at the working rank gap",
                lo / std::max(hi, 1e-300));
  return st;
}

CMat SystemState::log_rho() const {
  Eigen::VectorXd logs = eigvals.array().log();
  return eigvecs * logs.asDiagonal().toDenseMatrix().cast<Complex>() *
         eigvecs.adjoint();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

double min_eig_hermitian(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h));
  return es.eigenvalues().minCoeff();
}

}  // namespace

Qds Qds::validate(const Channel& channel, const SystemState& state,
                  const Tolerance& tol) {
  tol.check_valid();
  if (channel.dim != state.dim())
    throw Error(ErrorKind::DimensionMismatch,
                "channel and state dimensions differ");

  Qds q;
  q.dim_ = channel.dim;
  q.tol_ = tol;
  q.frame_ = state.eigvecs;
  q.eigs_ = state.eigvals;
  const Eigen::Index d = q.dim_;

  q.rho_ = q.eigs_.asDiagonal().toDenseMatrix().cast<Complex>();
  q.info_.faithful_ratio = q.eigs_.minCoeff() / q.eigs_.maxCoeff();

  // Rotate the channel into the eigenbasis of rho.
  CMat w = kron(q.frame_.transpose(), q.frame_.adjoint());
  Channel internal;
  internal.dim = d;
  internal.superop = w * channel.superop * w.adjoint();
  for (const auto& k : channel.kraus)
    internal.kraus.push_back(q.frame_.adjoint() * k * q.frame_);
  q.channel_ = std::move(internal);
  q.info_.kraus_given = channel.has_kraus();

  const CMat& s = q.channel_.superop;
  CMat id = CMat::Identity(d, d);

  // Unital.
  q.info_.unital_residual = (s * vec(id) - vec(id)).norm() / std::sqrt(double(d));
  if (q.info_.unital_residual > tol.eq_tol)
    throw Error(ErrorKind::NotUnital, "channel does not fix the identity",
                q.info_.unital_residual);

  // Completely positive: Choi positivity (and Hermiticity for raw input).
  CMat choi = choi_from_superop(s);
  double choi_herm = (choi - choi.adjoint()).norm() / std::max(1.0, choi.norm());
  if (choi_herm > tol.eq_tol)
    throw Error(ErrorKind::NotCP, "map is not Hermiticity-preserving", choi_herm);
  q.info_.cp_min_eig = min_eig_hermitian(choi);
  if (q.info_.cp_min_eig < -tol.eq_tol * std::max(1.0, double(d)))
    throw Error(ErrorKind::NotCP, "Choi matrix has a negative eigenvalue",
                -q.info_.cp_min_eig);

  // Sampled Schwarz inequality for superoperator-only inputs.
  if (!q.info_.kraus_given) {
    Rng rng(0x5c4a72u);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      CMat a = rng.gaussian_matrix(d, d);
      a /= std::max(1.0, a.norm());
      CMat gap = q.channel_.apply(a.adjoint() * a) -
                 q.channel_.apply(a.adjoint()) * q.channel_.apply(a);
      worst = std::min(worst, min_eig_hermitian(gap));
    }
    q.info_.schwarz_min_eig = worst;
    if (worst < -tol.eq_tol)
      throw Error(ErrorKind::NotCP, "sampled Schwarz inequality fails", -worst);
  }

  // Invariance of the state.
  CVec vrho = vec(q.rho_);
  q.info_.invariance_residual = (s.adjoint() * vrho - vrho).norm();
  if (q.info_.invariance_residual > tol.eq_tol)
    throw Error(ErrorKind::NotInvariantState,
                "state is not invariant under the channel",
                q.info_.invariance_residual);

  // Commutation with the modular generator ad_{log rho}.
  Eigen::VectorXd logs = q.eigs_.array().log();
  CMat h = logs.asDiagonal().toDenseMatrix().cast<Complex>();
  CMat g = kron(id, h) - kron(h.transpose(), id);
  q.info_.modular_residual =
      (s * g - g * s).norm() / std::max(1.0, g.norm());
  if (q.info_.modular_residual > tol.eq_tol)
    throw Error(ErrorKind::NoModularCommutation,
                "channel does not commute with the modular group",
                q.info_.modular_residual);

  // GNS weights W = kron(diag(sqrt r), I): coords(x) = W vec(x).
  Eigen::VectorXd roots = q.eigs_.cwiseSqrt();
  q.weights_ = kron(roots.asDiagonal().toDenseMatrix().cast<Complex>(), id);
  q.weights_inv_ =
      kron(roots.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>(), id);

  q.ip_ = InnerProduct::phi(q.rho_, tol);
  q.omega_ = q.ip_.coords(id);

  // phi-adjoint by the closed formula rho^{-1} Phi_*(rho b), cross-checked
  // against the GNS adjoint.
  CMat lrho = kron(id, q.rho_);
  CMat lrho_inv = kron(id, CMat(q.eigs_.cwiseInverse().asDiagonal()));
  CMat sharp_superop = lrho_inv * trace_dual_superop(s) * lrho;

  CMat gns_u = q.weights_ * s * q.weights_inv_;
  CMat gns_route = q.weights_inv_ * gns_u.adjoint() * q.weights_;
  q.info_.sharp_pairing_residual =
      (sharp_superop - gns_route).norm() / std::max(1.0, s.norm());
  if (q.info_.sharp_pairing_residual > tol.eq_tol)
    throw Error(ErrorKind::NoModularCommutation,
                "phi-adjoint pairing identity fails",
                q.info_.sharp_pairing_residual);

  Channel sharp = Channel::from_superop(sharp_superop);
  double sharp_unital =
      (sharp.superop * vec(id) - vec(id)).norm() / std::sqrt(double(d));
  if (sharp_unital > tol.eq_tol)
    throw Error(ErrorKind::NoModularCommutation, "phi-adjoint is not unital",
                sharp_unital);
  q.info_.sharp_cp_min_eig = min_eig_hermitian(choi_from_superop(sharp.superop));
  if (q.info_.sharp_cp_min_eig < -tol.eq_tol * std::max(1.0, double(d)))
    throw Error(ErrorKind::NoModularCommutation,
                "phi-adjoint is not completely positive",
                -q.info_.sharp_cp_min_eig);

  // (Phi#)# = Phi.
  CMat doubled = lrho_inv * trace_dual_superop(sharp.superop) * lrho;
  double involution = (doubled - s).norm() / std::max(1.0, s.norm());
  if (involution > tol.eq_tol)
    throw Error(ErrorKind::Internal, "phi-adjoint is not involutive", involution);

  q.sharp_ = std::move(sharp);
  return q;
}

CMat Qds::to_internal(const CMat& user) const {
  return frame_.adjoint() * user * frame_;
}

CMat Qds::from_internal(const CMat& internal) const {
  return frame_ * internal * frame_.adjoint();
}

CMat Qds::superop_from_internal(const CMat& s) const {
  CMat w = kron(frame_.transpose(), frame_.adjoint());
  return w.adjoint() * s * w;
}

CMat Qds::gns_matrix(const CMat& superop) const {
  return weights_ * superop * weights_inv_;
}

CMat Qds::superop_from_gns(const CMat& gns_mat) const {
  return weights_inv_ * gns_mat * weights_;
}

Complex Qds::phi(const CMat& a) const { return (rho_ * a).trace(); }

// ---------------------------------------------------------------------------
// Derived maps
// ---------------------------------------------------------------------------

Channel phi_sharp(const Qds& q) { return q.sharp(); }

Channel phi_k(const Qds& q, int k) {
  if (k >= 0) return q.channel().power(k);
  return q.sharp().power(-k);
}

Channel tau_k(const Qds& q, int k) {
  return phi_k(q, -k).compose(phi_k(q, k));
}

CMat sk_form(const Qds& q, int k, const CMat& a, const CMat& b) {
  if (a.rows() != q.dim() || b.rows() != q.dim() || a.cols() != q.dim() ||
      b.cols() != q.dim())
    throw Error(ErrorKind::DimensionMismatch, "sk_form argument size");
  Channel pk = phi_k(q, k);
  return pk.apply(a.adjoint() * b) - pk.apply(a.adjoint()) * pk.apply(b);
}

CMat modular_orbit(const Qds& q, const CMat& x, double t) {
  if (x.rows() != q.dim() || x.cols() != q.dim())
    throw Error(ErrorKind::DimensionMismatch, "modular_orbit argument size");
  const auto& r = q.rho_eigs();
  CMat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double phase = t * (std::log(r(i)) - std::log(r(j)));
      out(i, j) = x(i, j) * Complex(std::cos(phase), std::sin(phase));
    }
  return out;
}

}  // namespace revpart
