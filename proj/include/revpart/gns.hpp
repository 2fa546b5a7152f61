#pragma once

#include "revpart/algebra.hpp"
#include "revpart/qds.hpp"

namespace revpart {

// ---------------------------------------------------------------------------
// Operators on the GNS space
// ---------------------------------------------------------------------------

enum class GnsTag {
  U,
  Uk,
  Defect,
  VPlus,
  VMinus,
  Projection,
  ModularJ,
  ModularDelta,
  FlatIsometry,
};

// A linear operator on the GNS space expressed in the orthonormal basis
// {E_ij / sqrt(r_j)} fixed at validation; adjoints are plain conjugate
// transposes there. ModularJ is antilinear and stores the matrix m of
// xi -> m * conj(xi).
struct GnsOperator {
  CMat matrix;
  GnsTag tag = GnsTag::U;
};

struct GnsSpace {
  Eigen::Index dim = 0;
  CVec omega;
};

GnsSpace gns_space(const Qds& q);

// Left multiplication x -> a x as a GNS operator.
CMat gns_left_mult(const Qds& q, const CMat& a);

// The contraction implementing the dynamics, a Omega -> Phi(a) Omega. Its
// GNS adjoint is the contraction of the phi-adjoint.
GnsOperator contraction(const Qds& q);

// U^k for k >= 0, U^{* |k|} for k < 0.
GnsOperator u_k(const Qds& q, int k);

// Defect operator sqrt(I - T^* T).
GnsOperator defect(const GnsOperator& t, const Tolerance& tol);

// Strong limits of U^{*n} U^n and U^n U^{*n} by direct iteration.
struct VLimits {
  GnsOperator v_plus;
  GnsOperator v_minus;
  int iterations = 0;
  double residual = 0.0;            // last iterate difference
  double pairing_residual = 0.0;    // defect-form identity on basis pairs
};
VLimits v_limits(const Qds& q);

// Canonical splitting of the contraction into a unitary part on h0 and a
// completely non-unitary part on its complement. h0 is computed from the
// kernels of I - V_plus and I - V_minus and re-derived from the domain
// closures as an always-on self-check.
struct NagyFoias {
  Eigen::MatrixXcd h0;  // orthonormal coordinate bases
  Eigen::MatrixXcd h1;
  GnsOperator unitary_part;  // restriction to h0
  GnsOperator cnu_part;      // restriction to h1
  double h0_agreement = 0.0;  // distance between the two routes
  double unitary_sv_deviation = 0.0;
  double reducing_residual = 0.0;
  bool cnu_certified = false;
};
NagyFoias nagy_foias(const Qds& q);

// Splitting H = H_inf + K_inf induced by the reversible part.
struct HInfinity {
  Eigen::MatrixXcd h_inf;
  Eigen::MatrixXcd k_inf;
  GnsOperator p_inf;            // orthogonal projection onto h_inf
  double commutant_residual = 0.0;  // [P_inf, left mult by algebra] on basis
  double h0_containment = 0.0;      // h_inf inside h0
};
HInfinity h_infinity(const Qds& q);
HInfinity h_infinity(const Qds& q, const SubAlgebra& dinf);

// The unitary-part space recomputed by intersecting the closures of the
// multiplicative-domain orbits of the cyclic vector.
struct H0Domains {
  Eigen::MatrixXcd h0;
  int k_stabilized = 0;
  double intertwining_residual = 0.0;
};
H0Domains h0_via_domains(const Qds& q);

// Isometric identification of the flat GNS space with H_inf: the class of a
// is sent to E(a) Omega. Checks Z U_flat^n = Z U^n for small n.
struct FlatIsometry {
  GnsOperator z;
  double isometry_residual = 0.0;
  double intertwining_residual = 0.0;  // n <= 5
};
FlatIsometry flat_isometry(const Qds& q);
FlatIsometry flat_isometry(const Qds& q, const SubAlgebra& dinf,
                           const ConditionalExpectation& einf);

// Modular operators Delta (x -> rho x rho^{-1}) and the antilinear J
// (x -> rho^{1/2} x^* rho^{-1/2}) in GNS coordinates, with the commutation
// residuals against the contraction.
struct ModularOps {
  GnsOperator delta;
  GnsOperator j;
  double u_delta_commutator = 0.0;
  double u_j_commutator = 0.0;
};
ModularOps modular_ops(const Qds& q);

}  // namespace revpart
