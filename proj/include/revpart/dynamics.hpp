#pragma once

#include "revpart/algebra.hpp"
#include "revpart/gns.hpp"

#include <string>
#include <vector>

namespace revpart {

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct Classification {
  bool ergodic = false;
  bool weakly_mixing = false;
  bool mixing = false;
  bool completely_irreversible = false;
  bool asymptotic_equilibrium = false;
  double second_modulus = 0.0;  // largest non-peripheral eigenvalue modulus
  int dim_d_infinity = 0;
  int fixed_space_dim = 0;
  bool reversible_part_agrees = false;  // same predicates from the restriction
  std::string weak_mixing_note;
};

// Spectral classification: ergodic iff the fixed space is C I, mixing iff
// the peripheral spectrum is the simple eigenvalue 1, completely
// irreversible iff the reversible part is trivial. All predicates are
// recomputed from the restriction of the dynamics to the reversible part and
// compared.
Classification classify(const Qds& q);
Classification classify(const Qds& q, const SubAlgebra& dinf);

// Cesaro average (1/(N+1)) sum_k [phi(a Phi^k(b)) - phi(a) phi(b)].
Complex correlation_mean(const Qds& q, const CMat& a, const CMat& b, int n);

// ---------------------------------------------------------------------------
// Cesaro means
// ---------------------------------------------------------------------------

// E_k together with the measured distance of the Cesaro mean of tau_k powers
// from it (max phi-norm over unit GNS basis elements).
struct CesaroResult {
  ConditionalExpectation e_k;
  double residual = 0.0;
};
CesaroResult cesaro_expectation(const Qds& q, int k, int n);

// Conditional expectation onto d_infinity_plus, verified as the limit of the
// E_k family over the stabilization range.
ConditionalExpectation e_plus(const Qds& q);

// Symmetric Cesaro mean Z_N = (1/(2N+1)) sum_{k=-N}^{N} tau_k and its limit
// map realized through (V_+ + V_-)/2 on GNS coordinates.
struct ZMeanResult {
  CMat superop;                    // of Z_N
  double cesaro_residual = 0.0;    // ||Z_N - Z_limit|| in GNS operator norm
  double limit_vs_e_infinity = 0.0;
  double module_residual = 0.0;    // Z(a_par + a_perp) = a_par + Z(a_perp)
  bool strong_decay = false;
};
ZMeanResult z_mean(const Qds& q, int n);

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

struct EvolveResult {
  std::vector<CMat> trajectory;  // a, Phi(a), ..., Phi^n(a)
  bool decay_checked = false;    // only when the reversible part is trivial
  bool decay_ok = false;
  double worst_ratio = 0.0;      // vs second_modulus^j, capped at the fp floor
};
EvolveResult evolve(const Qds& q, const CMat& a, int n, bool adjoint = false);

// ---------------------------------------------------------------------------
// Dilation verification
// ---------------------------------------------------------------------------

struct DilationSpec {
  Eigen::Index hat_dim = 0;
  CMat w;              // unitary generating the reversible hat dynamics
  CMat rho_hat;        // hat state
  CMat embed_superop;  // D^2 x d^2
  CMat expect_superop; // d^2 x D^2
};

struct CheckLine {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct DilationReport {
  std::vector<CheckLine> checks;
  bool all_pass = false;
  // Biconditional separation data over the operator basis.
  double member_max_residual = 0.0;
  double nonmember_min_residual = 0.0;
  int nonmember_count = 0;
};

// Property checks on a user-supplied reversible dilation: monomorphism,
// state compatibility, the dilation identity up to n steps, the module
// identity, and the equivalence hat(Phi)(i(a)) = i(Phi(a)) iff a lies in the
// multiplicative domain. Mathematical falsity is reported, not thrown.
DilationReport verify_dilation(const Qds& q, const DilationSpec& hat, int n);

}  // namespace revpart
