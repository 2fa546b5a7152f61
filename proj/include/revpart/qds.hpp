#pragma once

#include "revpart/numerics.hpp"

#include <optional>
#include <vector>

namespace revpart {

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

// A unital completely positive map on M_d. The superoperator acts on
// column-stacked matrices and is always present; Kraus operators are kept
// when the channel was built from them, acting as a -> sum K_i^* a K_i.
struct Channel {
  Eigen::Index dim = 0;
  std::vector<CMat> kraus;
  CMat superop;

  static Channel from_kraus(std::vector<CMat> ks);
  static Channel from_superop(CMat s);
  static Channel identity_channel(Eigen::Index d);

  bool has_kraus() const { return !kraus.empty(); }
  CMat apply(const CMat& a) const;
  Channel compose(const Channel& rhs) const;  // this after rhs
  Channel power(int n) const;                 // n >= 0
  CMat choi() const;
};

CMat choi_from_superop(const CMat& s);
// Superoperator of the trace dual: tr(y Phi(a)) = tr(Phi_*(y) a).
CMat trace_dual_superop(const CMat& s);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

// A faithful density matrix with its eigendecomposition. Faithfulness is the
// relative test min_eig > rank_gap * max_eig.
struct SystemState {
  CMat rho;                  // as supplied
  Eigen::VectorXd eigvals;   // eigenbasis order used internally
  CMat eigvecs;              // rho = eigvecs * diag(eigvals) * eigvecs^*
  bool diagonal_input = false;

  static SystemState from_density(const CMat& rho, const Tolerance& tol = {});
  Eigen::Index dim() const { return rho.rows(); }
  CMat log_rho() const;
};

// ---------------------------------------------------------------------------
// The validated system (M_d, Phi, phi)
// ---------------------------------------------------------------------------

// Built by validate(). All fields live in the eigenbasis of rho (inputs are
// rotated once on entry), so the internal density matrix is diagonal and the
// GNS basis {E_ij / sqrt(r_j)} is orthonormal with plain coordinates.
class Qds {
 public:
  static Qds validate(const Channel& channel, const SystemState& state,
                      const Tolerance& tol = {});

  Eigen::Index dim() const { return dim_; }
  const Tolerance& tol() const { return tol_; }
  const Channel& channel() const { return channel_; }
  const Channel& sharp() const { return sharp_; }
  const CMat& rho() const { return rho_; }  // diagonal
  const Eigen::VectorXd& rho_eigs() const { return eigs_; }
  const InnerProduct& ip() const { return ip_; }

  // Rotation between the user's frame and the internal eigenbasis of rho.
  const CMat& frame() const { return frame_; }
  CMat to_internal(const CMat& user) const;
  CMat from_internal(const CMat& internal) const;
  CMat superop_from_internal(const CMat& s) const;

  // GNS machinery in the fixed orthonormal basis.
  CVec gns(const CMat& a) const { return ip_.coords(a); }
  CMat from_gns(const CVec& c) const { return ip_.from_coords(c); }
  CMat gns_matrix(const CMat& superop) const;       // W S W^{-1}
  CMat superop_from_gns(const CMat& gns_mat) const;  // W^{-1} G W
  const CVec& omega() const { return omega_; }

  Complex phi(const CMat& a) const;  // tr(rho a)

  struct ValidationInfo {
    double faithful_ratio = 0;
    double unital_residual = 0;
    double cp_min_eig = 0;
    double invariance_residual = 0;
    double modular_residual = 0;
    double sharp_pairing_residual = 0;
    double sharp_cp_min_eig = 0;
    double schwarz_min_eig = 0;  // sampled; 0 when Kraus given
    bool kraus_given = false;
  };
  const ValidationInfo& validation() const { return info_; }

 private:
  Qds() = default;

  Eigen::Index dim_ = 0;
  Tolerance tol_;
  Channel channel_;  // internal frame
  Channel sharp_;    // phi-adjoint, internal frame
  CMat rho_;
  Eigen::VectorXd eigs_;
  CMat frame_;  // columns: internal basis expressed in the user frame
  InnerProduct ip_;
  CVec omega_;
  CMat weights_;      // W = kron(diag(sqrt r), I)
  CMat weights_inv_;
  ValidationInfo info_;
};

// The phi-adjoint map, tr(rho b Phi(a)) = tr(rho Phi#(b) a).
Channel phi_sharp(const Qds& q);

// Phi^k for k >= 0, (Phi#)^|k| for k < 0.
Channel phi_k(const Qds& q, int k);

// tau_k = Phi_{-k} o Phi_k; unital, CP, invariant and self-phi-adjoint.
Channel tau_k(const Qds& q, int k);

// S_k(a,b) = Phi_k(a^* b) - Phi_k(a^*) Phi_k(b).
CMat sk_form(const Qds& q, int k, const CMat& a, const CMat& b);

// Modular flow sigma_t(x) = rho^{it} x rho^{-it}.
CMat modular_orbit(const Qds& q, const CMat& x, double t);

}  // namespace revpart
