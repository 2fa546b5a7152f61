#include "doctest.h"
#include "oracles.hpp"

#include "revpart/analyze.hpp"
#include "revpart/io.hpp"

#include <cstdio>
#include <fstream>

using namespace revpart;

TEST_SUITE_BEGIN("io");

TEST_CASE("complex scalars round-trip bit exactly") {
  Rng rng(19);
  for (int t = 0; t < 200; ++t) {
    Complex z(rng.gaussian() * std::pow(10.0, rng.uniform_int(-12, 12)),
              rng.gaussian());
    Json j = Json::parse(complex_to_json(z).dump());
    Complex back = complex_from_json(j);
    CHECK(back.real() == z.real());
    CHECK(back.imag() == z.imag());
  }
}

TEST_CASE("system files round-trip through text") {
  for (auto& [name, spec] : canonical_fixtures()) {
    Json j = Json::parse(system_to_json(spec).dump());
    SystemSpec back = system_from_json(j);
    CHECK(back.dim == spec.dim);
    CHECK((back.rho - spec.rho).norm() == 0.0);
    REQUIRE(back.kraus.size() == spec.kraus.size());
    for (size_t i = 0; i < spec.kraus.size(); ++i)
      CHECK((back.kraus[i] - spec.kraus[i]).norm() == 0.0);
    CHECK_NOTHROW(make_qds(back));
  }
}

TEST_CASE("superoperator-only files work") {
  Eigen::VectorXd law(2);
  law << 0.6, 0.4;
  SystemSpec spec = gen_dephasing(2, 0.5, law);
  SystemSpec as_superop;
  as_superop.dim = 2;
  as_superop.superop = spec.make_channel().superop;
  as_superop.rho = spec.rho;
  Json j = Json::parse(system_to_json(as_superop).dump());
  SystemSpec back = system_from_json(j);
  CHECK(back.kraus.empty());
  CHECK((back.superop - as_superop.superop).norm() == 0.0);
  Qds q = make_qds(back);
  CHECK(!q.validation().kraus_given);
}

TEST_CASE("tolerance overrides are carried and validated") {
  Eigen::VectorXd law(2);
  law << 0.6, 0.4;
  SystemSpec spec = gen_dephasing(2, 0.5, law);
  spec.tol.eq_tol = 1e-8;
  Json j = system_to_json(spec);
  REQUIRE(j.contains("tolerance"));
  SystemSpec back = system_from_json(j);
  CHECK(back.tol.eq_tol == 1e-8);

  Json bad = j;
  bad["tolerance"]["eq_tol"] = -1.0;
  CHECK_THROWS_AS(system_from_json(bad), Error);
}

TEST_CASE("parse errors name the problem") {
  CHECK_THROWS_AS(system_from_json(Json::parse("{}")), Error);
  CHECK_THROWS_AS(complex_from_json(Json::parse("[1.0]")), Error);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[ [1,0] ],[ ]]")), Error);
  try {
    read_system_file("/nonexistent/file.json");
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("analyze produces a deterministic report") {
  Eigen::VectorXd law(2);
  law << 0.6, 0.4;
  SystemSpec spec = gen_dephasing(2, 0.5, law);
  AnalyzeOptions opt;
  opt.seed = 42;
  opt.cesaro_n = 50;
  opt.z_mean_n = 50;
  std::string once = dump_report(analyze(spec, opt));
  std::string twice = dump_report(analyze(spec, opt));
  CHECK(once == twice);

  Json report = Json::parse(once);
  CHECK(report["schema_version"] == kSchemaVersion);
  CHECK(report["seed"] == 42);
  CHECK(report["validation"]["accepted"] == true);
  CHECK(report["algebra"]["d_infinity_dim"] == 2);
  CHECK(report["dynamics"]["classification"]["ergodic"] == false);
  CHECK(report["diagnostics"].empty());
}


TEST_CASE("generator families emit their canonical data") {
  SUBCASE("dephasing d = 2 uses the two-Kraus form") {
    Eigen::VectorXd law(2);
    law << 0.6, 0.4;
    SystemSpec spec = gen_dephasing(2, 0.5, law);
    REQUIRE(spec.kraus.size() == 2);
    CMat sz(2, 2);
    sz << 1, 0, 0, -1;
    CHECK((spec.kraus[0] - std::sqrt(0.75) * CMat::Identity(2, 2)).norm() <
          1e-14);
    CHECK((spec.kraus[1] - 0.5 * sz).norm() < 1e-14);
    // The channel acts as p a + (1 - p) diag(a).
    Channel c = spec.make_channel();
    Rng rng(2);
    CMat a = rng.gaussian_matrix(2, 2);
    CMat expected = 0.5 * a + 0.5 * CMat(a.diagonal().asDiagonal());
    CHECK((c.apply(a) - expected).norm() < 1e-12);
  }
  SUBCASE("dephasing in higher dimension pinches the same way") {
    Eigen::VectorXd law = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    Channel c = gen_dephasing(3, 0.3, law).make_channel();
    Rng rng(3);
    CMat a = rng.gaussian_matrix(3, 3);
    CMat expected = 0.3 * a + 0.7 * CMat(a.diagonal().asDiagonal());
    CHECK((c.apply(a) - expected).norm() < 1e-12);
  }
  SUBCASE("classical embeds the solved stationary law") {
    Eigen::MatrixXd p(2, 2);
    p << 0.9, 0.1, 0.3, 0.7;
    SystemSpec spec = gen_classical(p);
    CHECK(std::abs(spec.rho(0, 0).real() - 0.75) < 1e-12);
    CHECK(std::abs(spec.rho(1, 1).real() - 0.25) < 1e-12);
  }
  SUBCASE("random covariant draws validate across dimensions") {
    Rng rng(5);
    for (int t = 0; t < 9; ++t)
      CHECK_NOTHROW(make_qds(gen_random_covariant(2 + t % 3, rng)));
  }
}

TEST_SUITE_END();
