#include "doctest.h"
#include "oracles.hpp"

#include "revpart/algebra.hpp"
#include "revpart/generators.hpp"

#include <algorithm>

using namespace revpart;

namespace {

Qds fixture(const std::string& name) {
  for (auto& [n, spec] : canonical_fixtures())
    if (n == name) return make_qds(spec);
  throw std::runtime_error("unknown fixture");
}

}  // namespace

TEST_SUITE_BEGIN("algebra");

TEST_CASE("fixed_point_algebra") {
  SUBCASE("identity map fixes the full algebra") {
    Qds q = fixture("dephasing");
    SubAlgebra a = fixed_point_algebra(Channel::identity_channel(2), q);
    CHECK(a.dim() == 4);
  }
  SUBCASE("tau_1 of dephasing fixes the diagonal algebra") {
    Qds q = fixture("dephasing");
    SubAlgebra a = fixed_point_algebra(tau_k(q, 1), q);
    REQUIRE(a.dim() == 2);
    CHECK(a.space.membership_residual(oracles::e(2, 0, 0)) < 1e-10);
    CHECK(a.space.membership_residual(oracles::e(2, 1, 1)) < 1e-10);
    // Independent route: LU kernel of (superop - I).
    auto kernel = oracles::fixed_space_lu(tau_k(q, 1).superop);
    CHECK(kernel.cols() == 2);
  }
  SUBCASE("tau_1 of the classical chain fixes only scalars") {
    Qds q = fixture("classical");
    SubAlgebra a = fixed_point_algebra(tau_k(q, 1), q);
    CHECK(a.dim() == 1);
    CHECK(oracles::fixed_space_lu(tau_k(q, 1).superop).cols() == 1);
  }
  SUBCASE("non-self-adjoint maps are rejected") {
    Qds q = fixture("unitary");
    try {
      fixed_point_algebra(q.channel(), q);
      CHECK(false);
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::PreconditionViolated);
    }
  }
}

TEST_CASE("multiplicative_domain") {
  SUBCASE("automorphisms have the full domain") {
    CHECK(multiplicative_domain(fixture("unitary"), 1).dim() == 4);
  }
  SUBCASE("k = 0 gives the full algebra") {
    CHECK(multiplicative_domain(fixture("dephasing"), 0).dim() == 4);
  }
  SUBCASE("dephasing domain is diagonal, certified quadratically") {
    Qds q = fixture("dephasing");
    SubAlgebra a = multiplicative_domain(q, 1);
    REQUIRE(a.dim() == 2);
    for (const auto& b : a.basis())
      CHECK(oracles::multiplicative_residual(q.channel().superop, b) < 1e-10);
    // sigma_x is not in the domain.
    CHECK(a.space.membership_residual(oracles::sigma_x()) > 0.5);
    CHECK(oracles::multiplicative_residual(q.channel().superop,
                                           oracles::sigma_x()) > 0.1);
  }
  SUBCASE("classical chain domain is trivial") {
    CHECK(multiplicative_domain(fixture("classical"), 1).dim() == 1);
  }
  SUBCASE("inclusion chain of forward domains") {
    for (auto name : {"dephasing", "classical", "shift_dephase"}) {
      Qds q = fixture(name);
      for (int n = 1; n <= 4; ++n) {
        SubAlgebra outer = multiplicative_domain(q, n);
        SubAlgebra inner = multiplicative_domain(q, n + 1);
        CHECK(colspace::containment_residual(inner.space.coords,
                                             outer.space.coords) < 1e-9);
      }
    }
  }
}

TEST_CASE("d_infinity_plus and the multiplicative core") {
  SUBCASE("unitary: everything") {
    CHECK(d_infinity_plus(fixture("unitary")).dim() == 4);
    CHECK(multiplicative_core(fixture("unitary")).dim() == 4);
  }
  SUBCASE("dephasing: diagonal") {
    Qds q = fixture("dephasing");
    SubAlgebra plus = d_infinity_plus(q);
    REQUIRE(plus.dim() == 2);
    CHECK(plus.space.membership_residual(oracles::e(2, 0, 0)) < 1e-10);
    CHECK(multiplicative_core(q).dim() == 2);
  }
  SUBCASE("shift-and-dephase: the diagonal algebra in d = 3") {
    Qds q = fixture("shift_dephase");
    SubAlgebra plus = d_infinity_plus(q);
    REQUIRE(plus.dim() == 3);
    for (int i = 0; i < 3; ++i)
      CHECK(plus.space.membership_residual(oracles::e(3, i, i)) < 1e-10);
    // Brute force for n = 1, 2, 3: all forward domains equal the diagonal.
    for (int n = 1; n <= 3; ++n)
      CHECK(oracles::fixed_space_lu(tau_k(q, n).superop).cols() == 3);
  }
  SUBCASE("classical: scalars") {
    CHECK(multiplicative_core(fixture("classical")).dim() == 1);
  }
}

TEST_CASE("d_infinity") {
  SUBCASE("dimensions across the fixtures") {
    CHECK(d_infinity(fixture("unitary")).dim() == 4);
    CHECK(d_infinity(fixture("dephasing")).dim() == 2);
    CHECK(d_infinity(fixture("classical")).dim() == 1);
    CHECK(d_infinity(fixture("shift_dephase")).dim() == 3);
  }
  SUBCASE("restriction of the dynamics is an automorphism") {
    for (auto name : {"dephasing", "classical", "shift_dephase", "unitary"}) {
      Qds q = fixture(name);
      DInfinityInfo info = d_infinity_info(q);
      const Eigen::MatrixXcd& b = info.algebra.space.coords;
      CMat restricted = b.adjoint() * q.gns_matrix(q.channel().superop) * b;
      Eigen::JacobiSVD<CMat> svd(restricted);
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        CHECK(std::abs(svd.singularValues()(i) - 1.0) < 1e-9);
      for (const auto& d : info.algebra.basis())
        CHECK((q.sharp().apply(q.channel().apply(d)) - d).norm() < 1e-9);
    }
  }
  SUBCASE("maximality: a known reversible subalgebra is contained") {
    Qds q = fixture("shift_dephase");
    SubAlgebra dinf = d_infinity(q);
    std::vector<CMat> diag;
    for (int i = 0; i < 3; ++i) diag.push_back(oracles::e(3, i, i));
    OperatorSubspace known = orthonormalize(diag, q.ip(), q.tol());
    CHECK(colspace::containment_residual(known.coords, dinf.space.coords) <
          1e-9);
  }
}

TEST_CASE("peripheral_oracle agrees with the domain route") {
  for (auto& [name, spec] : canonical_fixtures()) {
    Qds q = make_qds(spec);
    SubAlgebra oracle = peripheral_oracle(q);
    SubAlgebra dinf = d_infinity(q);
    SubAlgebra core = multiplicative_core(q);
    CHECK(subspace_distance(oracle.space, dinf.space) < 1e-8);
    CHECK(subspace_distance(core.space, dinf.space) < 1e-8);
  }
  SUBCASE("random covariant draws") {
    Rng rng(99);
    for (int t = 0; t < 10; ++t) {
      Qds q = make_qds(gen_random_covariant(2 + t % 3, rng));
      CHECK(subspace_distance(peripheral_oracle(q).space,
                              d_infinity(q).space) < 1e-8);
    }
  }
}

TEST_CASE("perp_space") {
  Qds q = fixture("dephasing");
  SUBCASE("full algebra has zero complement") {
    CHECK(perp_space(full_algebra(q), q).dim() == 0);
  }
  SUBCASE("scalars: the complement is the kernel of the state") {
    OperatorSubspace p = perp_space(trivial_algebra(q), q);
    REQUIRE(p.dim() == 3);
    for (const auto& b : p.basis) CHECK(std::abs(q.phi(b)) < 1e-10);
  }
  SUBCASE("diagonal algebra: the off-diagonal matrix units") {
    SubAlgebra diag = multiplicative_domain(q, 1);
    OperatorSubspace p = perp_space(diag, q);
    REQUIRE(p.dim() == 2);
    CHECK(p.membership_residual(oracles::e(2, 0, 1)) < 1e-10);
    CHECK(p.membership_residual(oracles::e(2, 1, 0)) < 1e-10);
    CHECK(diag.dim() + p.dim() == 4);
  }
}

TEST_CASE("conditional_expectation") {
  Qds q = fixture("dephasing");
  SUBCASE("full algebra: identity") {
    ConditionalExpectation e = conditional_expectation(full_algebra(q), q);
    CHECK((e.superop - CMat::Identity(4, 4)).norm() < 1e-12);
  }
  SUBCASE("diagonal algebra: pinching") {
    ConditionalExpectation e =
        conditional_expectation(multiplicative_domain(q, 1), q);
    CHECK(e.apply(oracles::sigma_x()).norm() < 1e-12);
    CHECK((e.apply(oracles::e(2, 0, 0)) - oracles::e(2, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("scalars: a -> phi(a) I") {
    ConditionalExpectation e = conditional_expectation(trivial_algebra(q), q);
    Rng rng(3);
    CMat a = rng.gaussian_matrix(2, 2);
    CMat expected = q.phi(a) * CMat::Identity(2, 2);
    CHECK((e.apply(a) - expected).norm() < 1e-12);
  }
  SUBCASE("an algebra that is not modular-invariant is refused") {
    // span{I, sigma_x} is a *-algebra but sigma_t moves it when the state
    // weights differ.
    std::vector<CMat> gens = {CMat::Identity(2, 2), oracles::sigma_x()};
    SubAlgebra bad =
        certify_algebra(orthonormalize(gens, q.ip(), q.tol()), q, false);
    try {
      conditional_expectation(bad, q);
      CHECK(false);
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::ModularInvarianceFailure);
    }
  }
}

TEST_CASE("e_infinity and decomposition") {
  Qds q = fixture("dephasing");
  ConditionalExpectation e = e_infinity(q);

  SUBCASE("pinching on the fixture") {
    FlatElement f = decompose(oracles::e(2, 0, 0) + oracles::sigma_x(), e);
    CHECK((f.par - oracles::e(2, 0, 0)).norm() < 1e-12);
    CHECK((f.perp - oracles::sigma_x()).norm() < 1e-12);
  }
  SUBCASE("members decompose with no transient part") {
    FlatElement f = decompose(oracles::e(2, 1, 1), e);
    CHECK(f.perp.norm() < 1e-12);
  }
  SUBCASE("orthogonality, uniqueness, and the norm split") {
    Rng rng(13);
    for (auto& [name, spec] : canonical_fixtures()) {
      Qds qq = make_qds(spec);
      ConditionalExpectation ee = e_infinity(qq);
      for (int t = 0; t < 20; ++t) {
        CMat a = rng.gaussian_matrix(qq.dim(), qq.dim());
        FlatElement f = decompose(a, ee);
        CHECK((f.par + f.perp - a).norm() < 1e-14);  // reconstruction
        CHECK(std::abs(qq.ip().pair(f.par, f.perp)) < 1e-9);
        double whole = std::norm(qq.ip().norm(a));
        double split = std::norm(qq.ip().norm(f.par)) +
                       std::norm(qq.ip().norm(f.perp));
        CHECK(std::abs(whole - split) < 1e-9 * std::max(1.0, whole));
      }
    }
  }
  SUBCASE("kernel of the expectation is the orthogonal complement") {
    OperatorSubspace p = perp_space(e.target, q);
    for (const auto& b : p.basis) CHECK(e.apply(b).norm() < 1e-10);
    CHECK((e.superop * e.superop - e.superop).norm() < 1e-12);
  }
}

TEST_CASE("flat_product") {
  Qds q = fixture("dephasing");
  ConditionalExpectation e = e_infinity(q);

  SUBCASE("the identity is the unit") {
    Rng rng(7);
    FlatElement unit = decompose(CMat::Identity(2, 2), e);
    FlatElement y = decompose(rng.gaussian_matrix(2, 2), e);
    FlatElement prod = flat_product(unit, y, e);
    CHECK((prod.total() - y.total()).norm() < 1e-12);
  }
  SUBCASE("transient times transient vanishes while the operator product "
          "does not") {
    FlatElement sx = decompose(oracles::sigma_x(), e);
    CHECK(sx.par.norm() < 1e-12);
    FlatElement prod = flat_product(sx, sx, e);
    CHECK(prod.total().norm() == 0.0);  // dropped term, exact zero
    CHECK((oracles::sigma_x() * oracles::sigma_x() -
           CMat::Identity(2, 2)).norm() < 1e-15);
  }
  SUBCASE("reversible times transient keeps the cross term") {
    FlatElement x{oracles::e(2, 0, 0), CMat::Zero(2, 2)};
    FlatElement y{CMat::Zero(2, 2), oracles::e(2, 0, 1)};
    FlatElement prod = flat_product(x, y, e);
    CHECK(prod.par.norm() < 1e-12);
    CHECK((prod.perp - oracles::e(2, 0, 1)).norm() < 1e-12);
  }
  SUBCASE("elements split by a different expectation are refused") {
    ConditionalExpectation trivial =
        conditional_expectation(trivial_algebra(q), q);
    FlatElement wrong = decompose(oracles::e(2, 0, 0), trivial);
    FlatElement fine = decompose(oracles::e(2, 0, 0), e);
    CHECK_THROWS_AS(flat_product(wrong, fine, e), Error);
  }
  SUBCASE("associativity and the graded norm bound") {
    Rng rng(29);
    for (auto& [name, spec] : canonical_fixtures()) {
      Qds qq = make_qds(spec);
      ConditionalExpectation ee = e_infinity(qq);
      for (int t = 0; t < 15; ++t) {
        FlatElement a = decompose(rng.gaussian_matrix(qq.dim(), qq.dim()), ee);
        FlatElement b = decompose(rng.gaussian_matrix(qq.dim(), qq.dim()), ee);
        FlatElement c = decompose(rng.gaussian_matrix(qq.dim(), qq.dim()), ee);
        CMat lhs = flat_product(flat_product(a, b, ee), c, ee).total();
        CMat rhs = flat_product(a, flat_product(b, c, ee), ee).total();
        CHECK((lhs - rhs).norm() < 1e-9 * std::max(1.0, lhs.norm()));
        // Submultiplicativity holds for the split norm |par| + |perp|.
        FlatElement ab = flat_product(a, b, ee);
        double lhs_norm = op_norm(ab.par) + op_norm(ab.perp);
        double rhs_norm = (op_norm(a.par) + op_norm(a.perp)) *
                          (op_norm(b.par) + op_norm(b.perp));
        CHECK(lhs_norm <= rhs_norm * (1.0 + 1e-12) + 1e-12);
      }
    }
  }
}

TEST_CASE("flat product is not operator-norm submultiplicative") {
  // The dropped perp-perp term can add coherently: with the pinching,
  // a = sz + sx and b = sz - sx give a x b = I - 2 sz sx of norm sqrt(5),
  // while |a| |b| = 2. Only the graded norm |par| + |perp| is
  // submultiplicative.
  Qds q = fixture("dephasing");
  ConditionalExpectation e = e_infinity(q);
  CMat a_mat = oracles::sigma_z() + oracles::sigma_x();
  CMat b_mat = oracles::sigma_z() - oracles::sigma_x();
  FlatElement a = decompose(a_mat, e);
  FlatElement b = decompose(b_mat, e);
  double lhs = op_norm(flat_product(a, b, e).total());
  CHECK(std::abs(lhs - std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(op_norm(a_mat) * op_norm(b_mat) - 2.0) < 1e-12);
  CHECK(lhs > op_norm(a_mat) * op_norm(b_mat));
}

TEST_CASE("center and block structure") {
  Qds q3 = fixture("shift_dephase");

  SUBCASE("center of the full matrix algebra is scalar") {
    Qds q = fixture("unitary");
    CHECK(center(full_algebra(q), q).dim() == 1);
  }
  SUBCASE("abelian algebras are their own center") {
    Qds q = fixture("dephasing");
    SubAlgebra diag = multiplicative_domain(q, 1);
    SubAlgebra z = center(diag, q);
    CHECK(z.dim() == 2);
    CHECK(subspace_distance(z.space, diag.space) < 1e-10);
  }
  SUBCASE("a block algebra M_2 + C inside M_3") {
    std::vector<CMat> gens;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) gens.push_back(oracles::e(3, i, j));
    gens.push_back(oracles::e(3, 2, 2));
    SubAlgebra blocks =
        certify_algebra(orthonormalize(gens, q3.ip(), q3.tol()), q3, false);
    REQUIRE(blocks.dim() == 5);
    CHECK(center(blocks, q3).dim() == 2);
    auto dims = structure_report(blocks, q3);
    REQUIRE(dims.size() == 2);
    CHECK(dims[0] == 2);
    CHECK(dims[1] == 1);
  }
  SUBCASE("structure report on small algebras") {
    Qds q = fixture("unitary");
    auto full = structure_report(full_algebra(q), q);
    REQUIRE(full.size() == 1);
    CHECK(full[0] == 2);
    Qds qd = fixture("dephasing");
    auto diag = structure_report(multiplicative_domain(qd, 1), qd);
    CHECK(diag == std::vector<int>({1, 1}));
  }
}

TEST_CASE("certify_algebra shrinks a near-algebra to its certified part") {
  Qds q = fixture("dephasing");
  // span{I, E01} is product-closed but not star-closed; the shrink must
  // settle on the scalars.
  std::vector<CMat> gens = {CMat::Identity(2, 2), oracles::e(2, 0, 1)};
  SubAlgebra a =
      certify_algebra(orthonormalize(gens, q.ip(), q.tol()), q, true);
  CHECK(a.dim() == 1);
  CHECK(a.space.membership_residual(CMat::Identity(2, 2)) < 1e-9);
  CHECK_THROWS_AS(
      certify_algebra(orthonormalize(gens, q.ip(), q.tol()), q, false), Error);
}

TEST_CASE("abelian_effective") {
  SUBCASE("abelian reversible part: the algebra itself") {
    Qds q = fixture("dephasing");
    SubAlgebra a = abelian_effective(q);
    CHECK(a.dim() == 2);
  }
  SUBCASE("full matrix reversible part: scalars only") {
    Qds q = fixture("unitary");
    CHECK(abelian_effective(q).dim() == 1);
  }
  SUBCASE("trivial reversible part") {
    Qds q = fixture("classical");
    CHECK(abelian_effective(q).dim() == 1);
  }
  SUBCASE("invariance under the dynamics") {
    Qds q = fixture("shift_dephase");
    SubAlgebra a = abelian_effective(q);
    for (const auto& b : a.basis())
      CHECK(a.space.membership_residual(q.channel().apply(b)) < 1e-9);
  }
}

TEST_CASE("projector gap for completely irreversible systems") {
  for (auto name : {"classical", "random_covariant"}) {
    Qds q = fixture(name);
    if (d_infinity(q).dim() != 1) continue;
    Rng rng(41);
    CMat h = rng.hermitian(q.dim());
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CMat p = es.eigenvectors().col(0) * es.eigenvectors().col(0).adjoint();
    double phi_p = q.phi(p).real();
    CHECK(phi_p - phi_p * phi_p > 1e-8);
  }
}

TEST_SUITE_END();
