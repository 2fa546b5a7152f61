#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace revpart {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  DimensionMismatch,
  NotFaithful,
  NotUnital,
  NotCP,
  NotInvariantState,
  NoModularCommutation,
  PreconditionViolated,
  StabilizationFailure,
  CoreMismatch,
  ModularInvarianceFailure,
  ConvergenceFailure,
  NotContraction,
  DegenerateRandomElement,
  MismatchedExpectation,
  InvalidParams,
  ParseError,
  Internal,
};

const char* to_string(ErrorKind k);

// Every error names the violated hypothesis and carries the worst residual
// observed while checking it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double residual = 0.0);
  ErrorKind kind() const { return kind_; }
  double residual() const { return residual_; }

 private:
  ErrorKind kind_;
  double residual_;
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

// eq_tol    relative equality threshold for verified identities
// rank_gap  singular-value ratio for rank / membership decisions
// iter_max  cap for operator-limit iterations
// conv_tol  stopping threshold for those iterations
struct Tolerance {
  double eq_tol = 1e-9;
  double rank_gap = 1e-7;
  int iter_max = 10000;
  double conv_tol = 1e-12;

  void check_valid() const;  // throws InvalidParams
};

// ---------------------------------------------------------------------------
// Dense matrix helpers
// ---------------------------------------------------------------------------

// Kronecker product; the left factor acts on the slow index, so with
// column-stacking vec the superoperator of x -> A x B is kron(B^T, A).
CMat kron(const CMat& a, const CMat& b);

CVec vec(const CMat& x);  // column stacking
CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols);

CMat matrix_sqrt_psd(const CMat& h, double clip_tol);
double op_norm(const CMat& x);  // largest singular value
bool is_hermitian(const CMat& x, double tol);
CMat hermitize(const CMat& x);  // (x + x^*)/2

CMat basis_matrix(Eigen::Index d, Eigen::Index i, Eigen::Index j);  // E_ij
CMat identity(Eigen::Index d);

// ---------------------------------------------------------------------------
// Inner products on M_d
// ---------------------------------------------------------------------------

// Either plain Hilbert-Schmidt <x,y> = tr(x^* y) or the state-weighted
// pairing <x,y> = tr(rho x^* y). The coords map embeds M_d isometrically
// into C^{d^2}: vec(x) for HS, vec(x rho^{1/2}) for the weighted one.
struct InnerProduct {
  enum Tag { HS, Phi };

  Tag tag = HS;
  Eigen::Index dim = 0;
  CMat rho;        // Phi only
  CMat rho_sqrt;   // Phi only
  CMat rho_isqrt;  // Phi only

  static InnerProduct hs(Eigen::Index d);
  static InnerProduct phi(const CMat& rho, const Tolerance& tol = {});

  CVec coords(const CMat& x) const;
  CMat from_coords(const CVec& c) const;
  Complex pair(const CMat& x, const CMat& y) const;  // conjugate-linear in x
  double norm(const CMat& x) const;
  bool compatible(const InnerProduct& other, double tol) const;
};

// Sesquilinear pairing tr(rho x^* y); conjugate-linear in x, positive
// definite when rho is faithful.
Complex phi_inner(const CMat& x, const CMat& y, const CMat& rho,
                  const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Column-space primitives (orthonormal coordinate bases in C^n)
// ---------------------------------------------------------------------------

namespace colspace {

// Rank-revealing orthonormalization of the column span; columns whose
// singular value falls below rank_gap * sigma_max are dropped.
Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& cols, double rank_gap);

// Span of the intersection; exact for inputs whose principal angles are
// either 0 or above rank_gap.
Eigen::MatrixXcd intersect(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                           double rank_gap);

Eigen::MatrixXcd complement(const Eigen::MatrixXcd& a, Eigen::Index ambient);

// Orthonormal basis of ker(m); singular values below
// rank_gap * max(sigma_max, scale) count as zero. Pass the natural operator
// scale when m may be entirely at the noise floor.
Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& m, double rank_gap,
                           double scale = 0.0);

// Basis of the eigenspace {v : h v = v} of a Hermitian contraction h,
// eigenvalues within rank_gap of 1.
Eigen::MatrixXcd fixed_space_hermitian(const Eigen::MatrixXcd& h, double rank_gap);

double distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
double containment_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
bool contains_vector(const Eigen::MatrixXcd& basis, const Eigen::VectorXcd& v,
                     double tol);
Eigen::MatrixXcd projector(const Eigen::MatrixXcd& basis);

}  // namespace colspace

// ---------------------------------------------------------------------------
// Operator subspaces of M_d
// ---------------------------------------------------------------------------

// A subspace of d x d matrices given by an orthonormal operator basis under
// a declared inner product. `coords` caches the isometric coordinate basis.
struct OperatorSubspace {
  Eigen::Index ambient_dim = 0;
  InnerProduct ip;
  std::vector<CMat> basis;
  Eigen::MatrixXcd coords;  // d^2 x k, orthonormal columns

  Eigen::Index dim() const { return coords.cols(); }

  static OperatorSubspace from_coords(const InnerProduct& ip,
                                      Eigen::MatrixXcd coords);
  static OperatorSubspace zero(const InnerProduct& ip);
  static OperatorSubspace full(const InnerProduct& ip);

  // Projection of x onto the subspace under ip.
  CMat project(const CMat& x) const;
  double membership_residual(const CMat& x) const;  // ||x - P x|| / max(1, ||x||)
};

OperatorSubspace orthonormalize(const std::vector<CMat>& vectors,
                                const InnerProduct& ip,
                                const Tolerance& tol = {});

// Weighted-inner-product convenience form.
OperatorSubspace orthonormalize(const std::vector<CMat>& vectors,
                                const CMat& rho, const Tolerance& tol = {});

OperatorSubspace subspace_intersect(const OperatorSubspace& a,
                                    const OperatorSubspace& b,
                                    const Tolerance& tol = {});

// Basis of {X : XB = BX for all B in s}, via the nullspace of the stacked
// maps X -> XB - BX. Empty s yields the full space. Always contains I.
OperatorSubspace commutant(const std::vector<CMat>& s, const InnerProduct& ip,
                           const Tolerance& tol = {});

double subspace_distance(const OperatorSubspace& a, const OperatorSubspace& b);

}  // namespace revpart
