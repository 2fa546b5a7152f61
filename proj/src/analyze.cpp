#include "revpart/analyze.hpp"

#include "revpart/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace revpart {

namespace {

Json check_line(const std::string& name, double residual, double tol, bool pass) {
  return Json{{"name", name}, {"residual", residual}, {"tol", tol}, {"pass", pass}};
}

Json tolerance_json(const Tolerance& t) {
  return Json{{"eq_tol", t.eq_tol},
              {"rank_gap", t.rank_gap},
              {"iter_max", t.iter_max},
              {"conv_tol", t.conv_tol}};
}

Json validation_json(const Qds& q) {
  const auto& info = q.validation();
  const Tolerance& tol = q.tol();
  Json checks = Json::array();
  checks.push_back(check_line("faithful", 1.0 - info.faithful_ratio, 1.0,
                              info.faithful_ratio > tol.rank_gap));
  checks.push_back(check_line("unital", info.unital_residual, tol.eq_tol,
                              info.unital_residual <= tol.eq_tol));
  checks.push_back(check_line("completely_positive", -info.cp_min_eig,
                              tol.eq_tol, info.cp_min_eig >= -tol.eq_tol));
  checks.push_back(check_line("invariant_state", info.invariance_residual,
                              tol.eq_tol, info.invariance_residual <= tol.eq_tol));
  checks.push_back(check_line("modular_commutation", info.modular_residual,
                              tol.eq_tol, info.modular_residual <= tol.eq_tol));
  checks.push_back(check_line("adjoint_pairing", info.sharp_pairing_residual,
                              tol.eq_tol,
                              info.sharp_pairing_residual <= tol.eq_tol));
  checks.push_back(check_line("adjoint_completely_positive",
                              -info.sharp_cp_min_eig, tol.eq_tol,
                              info.sharp_cp_min_eig >= -tol.eq_tol));
  if (!info.kraus_given)
    checks.push_back(check_line("sampled_schwarz", -info.schwarz_min_eig,
                                tol.eq_tol, info.schwarz_min_eig >= -tol.eq_tol));
  return Json{{"accepted", true},
              {"kraus_given", info.kraus_given},
              {"checks", checks}};
}

}  // namespace

Json analyze(const SystemSpec& raw, const AnalyzeOptions& opt) {
  SystemSpec spec = raw;
  if (opt.eq_tol_override) {
    spec.tol.eq_tol = *opt.eq_tol_override;
    spec.tol.check_valid();
  }

  Json report;
  report["schema_version"] = kSchemaVersion;
  report["seed"] = opt.seed;
  report["dim"] = spec.dim;
  report["tolerance"] = tolerance_json(spec.tol);
  Json diagnostics = Json::array();

  Qds q = make_qds(spec);  // throws on rejection; caller maps to exit 2
  report["validation"] = validation_json(q);

  Rng rng(opt.seed);
  const Tolerance& tol = q.tol();

  // ---------------------------------------------------------------- algebra
  std::optional<DInfinityInfo> dinfo;
  std::optional<ConditionalExpectation> einf;
  try {
    Json algebra;
    dinfo = d_infinity_info(q);
    const SubAlgebra& dinf = dinfo->algebra;

    int k_report = std::min(opt.k_report_cap, dinfo->k_stabilized + 1);
    Json domain_dims = Json::array();
    for (int k = 1; k <= k_report; ++k) {
      domain_dims.push_back(
          Json{{"k", k}, {"dim", multiplicative_domain(q, k).dim()}});
      domain_dims.push_back(
          Json{{"k", -k}, {"dim", multiplicative_domain(q, -k).dim()}});
    }
    algebra["multiplicative_domain_dims"] = domain_dims;
    algebra["k_stabilized"] = dinfo->k_stabilized;
    algebra["d_infinity_dim"] = dinf.dim();
    algebra["d_infinity_plus_dim"] = d_infinity_plus(q).dim();
    algebra["multiplicative_core_dim"] = multiplicative_core(q).dim();

    SubAlgebra oracle = peripheral_oracle(q);
    algebra["oracle_agreement"] =
        Json{{"peripheral_vs_d_infinity",
              subspace_distance(oracle.space, dinf.space)},
             {"core_vs_d_infinity", dinfo->core_distance},
             {"tol", 1e-8}};

    algebra["block_structure"] = structure_report(dinf, q, rng);
    algebra["abelian_effective_dim"] =
        abelian_effective(q, dinf, rng, 200).dim();

    einf = e_infinity(q, dinf);
    algebra["e_infinity_superop"] =
        matrix_to_json(q.superop_from_internal(einf->superop));

    // Flat-product spot checks on seeded random pairs.
    double assoc = 0.0, hom = 0.0, perp_annihilation = 0.0;
    int submult_violations = 0;
    for (int t = 0; t < opt.flat_pairs; ++t) {
      CMat a = rng.gaussian_matrix(q.dim(), q.dim());
      CMat b = rng.gaussian_matrix(q.dim(), q.dim());
      CMat c = rng.gaussian_matrix(q.dim(), q.dim());
      FlatElement fa = decompose(a, *einf);
      FlatElement fb = decompose(b, *einf);
      FlatElement fc = decompose(c, *einf);
      FlatElement ab = flat_product(fa, fb, *einf);
      FlatElement bc = flat_product(fb, fc, *einf);
      assoc = std::max(assoc, (flat_product(ab, fc, *einf).total() -
                               flat_product(fa, bc, *einf).total()).norm());
      if (op_norm(ab.total()) >
          op_norm(fa.total()) * op_norm(fb.total()) + 1e-12)
        ++submult_violations;
      FlatElement pa{CMat::Zero(q.dim(), q.dim()), fa.perp};
      FlatElement pb{CMat::Zero(q.dim(), q.dim()), fb.perp};
      perp_annihilation = std::max(
          perp_annihilation, flat_product(pa, pb, *einf).total().norm());
      CMat lhs = q.channel().apply(ab.total());
      FlatElement fa2 = decompose(q.channel().apply(a), *einf);
      FlatElement fb2 = decompose(q.channel().apply(b), *einf);
      hom = std::max(hom,
                     (lhs - flat_product(fa2, fb2, *einf).total()).norm());
    }
    algebra["flat_checks"] = Json{{"pairs", opt.flat_pairs},
                                  {"associativity_max", assoc},
                                  {"homomorphism_max", hom},
                                  {"perp_annihilation_max", perp_annihilation},
                                  {"submultiplicativity_violations",
                                   submult_violations},
                                  {"tol", 1e-8}};
    report["algebra"] = std::move(algebra);
  } catch (const Error& e) {
    diagnostics.push_back(Json{{"module", "algebra"},
                               {"kind", to_string(e.kind())},
                               {"message", e.what()},
                               {"residual", e.residual()}});
  }

  // -------------------------------------------------------------------- gns
  try {
    if (!dinfo) throw Error(ErrorKind::Internal, "algebra phase unavailable");
    Json gns;
    VLimits vl = v_limits(q);
    gns["v_limits"] = Json{{"iterations", vl.iterations},
                           {"residual", vl.residual},
                           {"pairing_residual", vl.pairing_residual},
                           {"tol", tol.conv_tol}};

    NagyFoias nf = nagy_foias(q);
    gns["nagy_foias"] = Json{{"dim_h0", nf.h0.cols()},
                             {"dim_h1", nf.h1.cols()},
                             {"h0_agreement", nf.h0_agreement},
                             {"unitary_sv_deviation", nf.unitary_sv_deviation},
                             {"reducing_residual", nf.reducing_residual},
                             {"cnu_certified", nf.cnu_certified},
                             {"tol", 1e-8}};

    HInfinity hi = h_infinity(q, dinfo->algebra);
    double v_vs_p = op_norm(vl.v_plus.matrix - hi.p_inf.matrix);
    gns["h_infinity"] = Json{{"dim", hi.h_inf.cols()},
                             {"h0_containment", hi.h0_containment},
                             {"commutant_residual", hi.commutant_residual},
                             {"v_plus_vs_p_inf", v_vs_p},
                             {"tol", 1e-8}};

    ModularOps mo = modular_ops(q);
    gns["modular"] = Json{{"u_delta_commutator", mo.u_delta_commutator},
                          {"u_j_commutator", mo.u_j_commutator},
                          {"tol", tol.eq_tol}};

    FlatIsometry fi = flat_isometry(q, dinfo->algebra, *einf);
    gns["flat_isometry"] =
        Json{{"isometry_residual", fi.isometry_residual},
             {"intertwining_residual", fi.intertwining_residual},
             {"tol", 1e-8}};
    report["gns"] = std::move(gns);
  } catch (const Error& e) {
    diagnostics.push_back(Json{{"module", "gns"},
                               {"kind", to_string(e.kind())},
                               {"message", e.what()},
                               {"residual", e.residual()}});
  }

  // --------------------------------------------------------------- dynamics
  try {
    if (!dinfo) throw Error(ErrorKind::Internal, "algebra phase unavailable");
    Json dynamics;
    Classification cls = classify(q, dinfo->algebra);
    dynamics["classification"] =
        Json{{"ergodic", cls.ergodic},
             {"weakly_mixing", cls.weakly_mixing},
             {"mixing", cls.mixing},
             {"completely_irreversible", cls.completely_irreversible},
             {"asymptotic_equilibrium", cls.asymptotic_equilibrium},
             {"second_modulus", cls.second_modulus},
             {"dim_d_infinity", cls.dim_d_infinity},
             {"fixed_space_dim", cls.fixed_space_dim},
             {"reversible_part_agrees", cls.reversible_part_agrees},
             {"weak_mixing_note", cls.weak_mixing_note}};

    Json cesaro = Json::array();
    for (int k : {1, -1, 2, -2})
      for (int n : {10, 50, opt.cesaro_n}) {
        CesaroResult cr = cesaro_expectation(q, k, n);
        cesaro.push_back(Json{{"k", k},
                              {"N", n},
                              {"residual", cr.residual},
                              {"e_k_dim", cr.e_k.target.dim()}});
      }
    dynamics["cesaro"] = std::move(cesaro);

    ZMeanResult zm = z_mean(q, opt.z_mean_n);
    dynamics["z_mean"] = Json{{"N", opt.z_mean_n},
                              {"cesaro_residual", zm.cesaro_residual},
                              {"limit_vs_e_infinity", zm.limit_vs_e_infinity},
                              {"module_residual", zm.module_residual},
                              {"strong_decay", zm.strong_decay}};
    report["dynamics"] = std::move(dynamics);
  } catch (const Error& e) {
    diagnostics.push_back(Json{{"module", "dynamics"},
                               {"kind", to_string(e.kind())},
                               {"message", e.what()},
                               {"residual", e.residual()}});
  }

  report["diagnostics"] = std::move(diagnostics);
  return report;
}

}  // namespace revpart
