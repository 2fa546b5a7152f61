#pragma once

#include "revpart/qds.hpp"
#include "revpart/rng.hpp"

#include <string>
#include <vector>

namespace revpart {

// A system ready for validation: channel data plus the state, as produced by
// the generators and by the file reader.
struct SystemSpec {
  Eigen::Index dim = 0;
  std::vector<CMat> kraus;  // empty when superop-only
  CMat superop;             // used when kraus is empty
  CMat rho;
  Tolerance tol;

  Channel make_channel() const;
};

Qds make_qds(const SystemSpec& spec);

// Phi(a) = p a + (1-p) diag(a) in the eigenbasis of rho. For d = 2 the Kraus
// pair is sqrt((1+p)/2) I, sqrt((1-p)/2) sigma_z; larger d uses clock-phase
// Kraus operators.
SystemSpec gen_dephasing(Eigen::Index d, double p, const Eigen::VectorXd& rho_diag);

// a -> U^* a U with U = diag(exp(i theta_j)), which commutes with rho.
SystemSpec gen_unitary(Eigen::Index d, const Eigen::VectorXd& phases,
                       const Eigen::VectorXd& rho_diag);

// Heisenberg embedding of a row-stochastic chain: a -> sum_ij P_ij a_jj E_ii,
// with rho = diag(pi) solved from the stationarity equation.
SystemSpec gen_classical(const Eigen::MatrixXd& p);

// Kraus K_i = E_{s(i), i} for the cyclic shift s: full dephasing followed by
// a cyclic permutation of the diagonal; rho = I/d.
SystemSpec gen_shift_dephase(Eigen::Index d);

// Convex combination of a unitary commuting with rho, dephasing in the
// eigenbasis of rho, and a classical channel with the matching stationary
// law. The class is closed under the standing hypotheses.
SystemSpec gen_random_covariant(Eigen::Index d, Rng& rng);

// Canonical fixture per generator family, in the order
// dephasing, unitary, classical, shift_dephase, random_covariant.
std::vector<std::pair<std::string, SystemSpec>> canonical_fixtures();

Eigen::VectorXd stationary_law(const Eigen::MatrixXd& p);

}  // namespace revpart
