#pragma once

#include "revpart/qds.hpp"
#include "revpart/rng.hpp"

namespace revpart {

// ---------------------------------------------------------------------------
// Certified *-subalgebras
// ---------------------------------------------------------------------------

struct SubAlgebra {
  OperatorSubspace space;
  struct Certificate {
    bool has_identity = false;
    bool star_closed = false;
    bool product_closed = false;
    double worst_residual = 0.0;
  } certified;

  Eigen::Index dim() const { return space.dim(); }
  const std::vector<CMat>& basis() const { return space.basis; }
};

SubAlgebra full_algebra(const Qds& q);
SubAlgebra trivial_algebra(const Qds& q);  // C I

// Certify an operator subspace as a unital *-subalgebra. With allow_shrink,
// basis vectors violating star/product closure are removed greedily (worst
// violator first) until the remainder certifies.
SubAlgebra certify_algebra(OperatorSubspace space, const Qds& q,
                           bool allow_shrink);

// Eigenvalue-1 eigenspace of a unital, CP, invariant, self-phi-adjoint map,
// certified as a *-subalgebra.
SubAlgebra fixed_point_algebra(const Channel& t, const Qds& q);

// Multiplicative domain of Phi_k, computed as the fixed points of tau_k and
// cross-checked against the definitional quadratic test on the basis.
SubAlgebra multiplicative_domain(const Qds& q, int k);

// Decreasing intersection of the domains of the forward powers.
SubAlgebra d_infinity_plus(const Qds& q);

// Intersection of the forward images Phi^n(d_infinity_plus).
SubAlgebra multiplicative_core(const Qds& q);

// The effective-observable algebra: intersection of the domains of all
// forward and backward powers; the maximal subalgebra on which the dynamics
// is a *-automorphism. Verified against the multiplicative core.
SubAlgebra d_infinity(const Qds& q);

struct DInfinityInfo {
  SubAlgebra algebra;
  int k_stabilized = 0;
  std::vector<Eigen::Index> dims_per_k;  // dims after folding in +-k
  double automorphism_residual = 0.0;
  double core_distance = 0.0;
};
DInfinityInfo d_infinity_info(const Qds& q);

// Independent spectral route: span of the eigenoperators of the superoperator
// with |eigenvalue| >= 1 - rank_gap, certified as an algebra.
SubAlgebra peripheral_oracle(const Qds& q);

// phi-orthogonal complement {a : phi(a^* x) = 0 for all x in R}.
OperatorSubspace perp_space(const SubAlgebra& r, const Qds& q);

// ---------------------------------------------------------------------------
// Conditional expectations
// ---------------------------------------------------------------------------

struct ConditionalExpectation {
  SubAlgebra target;
  CMat superop;         // acts on column-stacked matrices, internal frame
  CMat gns_projection;  // orthogonal projection in GNS coordinates
  Eigen::Index dim = 0;

  CMat apply(const CMat& a) const;
};

// The phi-orthogonal projection onto a modular-invariant certified algebra;
// all conditional-expectation properties are verified at construction.
ConditionalExpectation conditional_expectation(const SubAlgebra& r, const Qds& q);

// E onto d_infinity, with the commutation checks E o Phi_k = Phi_k o E.
ConditionalExpectation e_infinity(const Qds& q);
ConditionalExpectation e_infinity(const Qds& q, const SubAlgebra& dinf);

// ---------------------------------------------------------------------------
// Decomposition M = R + R^perp and the flat product
// ---------------------------------------------------------------------------

struct FlatElement {
  CMat par;   // component in the target algebra
  CMat perp;  // component in its phi-orthogonal complement
  CMat total() const { return par + perp; }
};

FlatElement decompose(const CMat& a, const ConditionalExpectation& e);

// a x b = a_par b_par + a_par b_perp + a_perp b_par; the perp-perp term is
// dropped, so perp x perp = 0 by construction.
FlatElement flat_product(const FlatElement& x, const FlatElement& y,
                         const ConditionalExpectation& e);

// ---------------------------------------------------------------------------
// Structure of the reversible part
// ---------------------------------------------------------------------------

SubAlgebra center(const SubAlgebra& r, const Qds& q);

// Z(d_infinity): the abelian algebra of effective observables, verified
// invariant and cross-checked against sampled pure states of the reversible
// part.
SubAlgebra abelian_effective(const Qds& q);
SubAlgebra abelian_effective(const Qds& q, const SubAlgebra& dinf, Rng& rng,
                             int samples = 200);

// Minimal central projections of a certified algebra plus the matrix-unit
// size of each block (d_block^2 sums to dim R).
struct CentralDecomposition {
  std::vector<CMat> projections;
  std::vector<int> block_dims;
};
CentralDecomposition central_decomposition(const SubAlgebra& r, const Qds& q,
                                           Rng& rng);

// Block dimensions from spectral projections of a random Hermitian central
// element; retries up to 5 draws before reporting a degenerate element.
std::vector<int> structure_report(const SubAlgebra& r, const Qds& q);
std::vector<int> structure_report(const SubAlgebra& r, const Qds& q, Rng& rng);

}  // namespace revpart
