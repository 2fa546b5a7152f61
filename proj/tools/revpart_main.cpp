// Command-line front end: analyze | gen | decompose | evolve | nagyfoias |
// cesaro. Reads and writes the JSON system format; see README.md.

#include "CLI11.hpp"

#include "revpart/analyze.hpp"
#include "revpart/dynamics.hpp"
#include "revpart/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <iomanip>
#include <sstream>

using namespace revpart;

namespace {

bool is_rejection(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotUnital:
    case ErrorKind::NotCP:
    case ErrorKind::NotInvariantState:
    case ErrorKind::NotFaithful:
    case ErrorKind::NoModularCommutation:
      return true;
    default:
      return false;
  }
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << dump_report(j);
  else
    write_json_file(out_path, j);
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::ParseError, "cannot open " + out_path);
    out << text;
  }
}

CMat parse_operator(const std::string& token, Eigen::Index d) {
  if (!token.empty() && token.front() == '[') {
    Json j = Json::parse(token);
    CMat m = matrix_from_json(j);
    if (m.rows() != d || m.cols() != d)
      throw Error(ErrorKind::ParseError, "operator shape mismatch");
    return m;
  }
  if (token == "I") return CMat::Identity(d, d);
  if (token.size() >= 3 && token[0] == 'E') {
    int i = token[1] - '0';
    int j = token[2] - '0';
    if (i >= 0 && i < d && j >= 0 && j < d) return basis_matrix(d, i, j);
    throw Error(ErrorKind::ParseError, "basis element out of range: " + token);
  }
  if (d == 2) {
    CMat m(2, 2);
    if (token == "sigma_x") {
      m << 0, 1, 1, 0;
      return m;
    }
    if (token == "sigma_y") {
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      return m;
    }
    if (token == "sigma_z") {
      m << 1, 0, 0, -1;
      return m;
    }
  }
  throw Error(ErrorKind::ParseError, "unknown operator name: " + token);
}

Eigen::VectorXd parse_reals(const std::string& csv) {
  Eigen::VectorXd out;
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    vals.push_back(std::stod(item));
  out.resize(Eigen::Index(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) out(Eigen::Index(i)) = vals[i];
  return out;
}

Eigen::MatrixXd parse_real_matrix(const std::string& text) {
  std::vector<Eigen::VectorXd> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_reals(row));
  if (rows.empty()) throw Error(ErrorKind::ParseError, "empty matrix literal");
  Eigen::MatrixXd m(Eigen::Index(rows.size()), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw Error(ErrorKind::ParseError, "ragged matrix literal");
    m.row(Eigen::Index(i)) = rows[i];
  }
  return m;
}

SystemSpec load_system(const std::string& path, std::optional<double> tol) {
  SystemSpec spec = read_system_file(path);
  if (const char* env = std::getenv("REVPART_TOL")) {
    spec.tol.eq_tol = std::stod(env);
    spec.tol.check_valid();
  }
  if (tol) {
    spec.tol.eq_tol = *tol;
    spec.tol.check_valid();
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reversible-part analysis of finite-dimensional quantum "
               "dynamical systems"};
  app.require_subcommand(1);

  std::string in_path, out_path, op_token = "I", family, rho_csv, p_text;
  std::optional<double> tol_flag;
  std::uint64_t seed = 1;
  bool csv = false;
  int steps = 10, cesaro_k = 1, cesaro_n = 10;
  Eigen::Index dim = 2;
  double deph_p = 0.5;
  std::vector<double> phases;
  std::string direction = "forward";

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("input", in_path, "system JSON file")->required();
    cmd->add_option("--tol", tol_flag, "override eq_tol");
    cmd->add_option("--seed", seed, "RNG seed (echoed in reports)");
    cmd->add_option("--out", out_path, "write output to a file");
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "full analysis report");
  add_common(analyze_cmd, true);

  CLI::App* gen_cmd = app.add_subcommand("gen", "emit a generated system file");
  gen_cmd->add_option("family", family,
                      "dephasing | unitary | classical | shift_dephase | "
                      "random_covariant")
      ->required();
  gen_cmd->add_option("--d", dim, "dimension");
  gen_cmd->add_option("--p", deph_p, "dephasing weight");
  gen_cmd->add_option("--rho", rho_csv, "state weights, comma separated");
  gen_cmd->add_option("--phase", phases, "unitary phases (one or d values)");
  gen_cmd->add_option("--P", p_text, "row-stochastic matrix, rows ; separated");
  gen_cmd->add_option("--seed", seed, "RNG seed for random_covariant");
  gen_cmd->add_option("--out", out_path, "write output to a file");

  CLI::App* dec_cmd = app.add_subcommand("decompose",
                                         "split an operator into reversible "
                                         "and transient parts");
  add_common(dec_cmd, true);
  dec_cmd->add_option("--op", op_token, "operator name or JSON matrix");

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "iterate the dynamics");
  add_common(evolve_cmd, true);
  evolve_cmd->add_option("--op", op_token, "operator name or JSON matrix");
  evolve_cmd->add_option("--n", steps, "number of steps");
  evolve_cmd->add_option("--direction", direction, "forward | adjoint");
  evolve_cmd->add_flag("--csv", csv, "emit a per-step CSV table");

  CLI::App* nf_cmd = app.add_subcommand("nagyfoias",
                                        "unitary / completely-non-unitary "
                                        "splitting of the induced contraction");
  add_common(nf_cmd, true);

  CLI::App* cesaro_cmd =
      app.add_subcommand("cesaro", "Cesaro-mean distance to the conditional "
                                   "expectation");
  add_common(cesaro_cmd, true);
  cesaro_cmd->add_option("--k", cesaro_k, "power index");
  cesaro_cmd->add_option("--N", cesaro_n, "averaging horizon");
  cesaro_cmd->add_flag("--csv", csv, "emit a per-step CSV table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze_cmd) {
      SystemSpec spec = load_system(in_path, tol_flag);
      AnalyzeOptions opt;
      opt.seed = seed;
      try {
        emit(analyze(spec, opt), out_path);
      } catch (const Error& e) {
        if (!is_rejection(e.kind())) throw;
        Json rejection{{"accepted", false},
                       {"rejected_hypothesis", to_string(e.kind())},
                       {"residual", e.residual()},
                       {"message", e.what()}};
        emit(rejection, out_path);
        return 2;
      }
      return 0;
    }

    if (*gen_cmd) {
      SystemSpec spec;
      if (family == "dephasing") {
        Eigen::VectorXd law = rho_csv.empty()
                                  ? Eigen::VectorXd::Constant(dim, 1.0 / double(dim))
                                  : parse_reals(rho_csv);
        spec = gen_dephasing(dim, deph_p, law);
      } else if (family == "unitary") {
        Eigen::VectorXd law = rho_csv.empty()
                                  ? Eigen::VectorXd::Constant(dim, 1.0 / double(dim))
                                  : parse_reals(rho_csv);
        Eigen::VectorXd ph(Eigen::Index(phases.size()));
        for (size_t i = 0; i < phases.size(); ++i)
          ph(Eigen::Index(i)) = phases[i];
        spec = gen_unitary(dim, ph, law);
      } else if (family == "classical") {
        spec = gen_classical(parse_real_matrix(p_text));
      } else if (family == "shift_dephase") {
        spec = gen_shift_dephase(dim);
      } else if (family == "random_covariant") {
        Rng rng(seed);
        spec = gen_random_covariant(dim, rng);
      } else {
        throw Error(ErrorKind::InvalidParams, "unknown family: " + family);
      }
      make_qds(spec);  // generated systems always validate
      emit(system_to_json(spec), out_path);
      return 0;
    }

    // Remaining subcommands share the validated system.
    SystemSpec spec = load_system(in_path, tol_flag);
    Qds q = make_qds(spec);

    if (*dec_cmd) {
      CMat op = q.to_internal(parse_operator(op_token, q.dim()));
      FlatElement f = decompose(op, e_infinity(q));
      Json j{{"par", matrix_to_json(q.from_internal(f.par))},
             {"perp", matrix_to_json(q.from_internal(f.perp))}};
      emit(j, out_path);
      return 0;
    }

    if (*evolve_cmd) {
      if (direction != "forward" && direction != "adjoint")
        throw Error(ErrorKind::InvalidParams, "direction must be forward or adjoint");
      CMat op = q.to_internal(parse_operator(op_token, q.dim()));
      EvolveResult r = evolve(q, op, steps, direction == "adjoint");
      CMat limit = q.phi(op) * CMat::Identity(q.dim(), q.dim());
      if (csv) {
        std::ostringstream table;
        table << std::setprecision(17) << "step,norm,residual\n";
        for (size_t s = 0; s < r.trajectory.size(); ++s)
          table << s << ',' << r.trajectory[s].norm() << ','
                << (r.trajectory[s] - limit).norm() << '\n';
        emit_text(table.str(), out_path);
      } else {
        Json traj = Json::array();
        for (const auto& m : r.trajectory)
          traj.push_back(matrix_to_json(q.from_internal(m)));
        Json j{{"trajectory", traj},
               {"decay_checked", r.decay_checked},
               {"decay_ok", r.decay_ok},
               {"worst_ratio", r.worst_ratio}};
        emit(j, out_path);
      }
      return 0;
    }

    if (*nf_cmd) {
      NagyFoias nf = nagy_foias(q);
      Json j{{"dim_h0", nf.h0.cols()},
             {"dim_h1", nf.h1.cols()},
             {"h0_agreement", nf.h0_agreement},
             {"unitary_sv_deviation", nf.unitary_sv_deviation},
             {"reducing_residual", nf.reducing_residual},
             {"cnu_certified", nf.cnu_certified}};
      emit(j, out_path);
      return 0;
    }

    if (*cesaro_cmd) {
      if (csv) {
        std::ostringstream table;
        table << std::setprecision(17) << "step,norm,residual\n";
        for (int n = 1; n <= cesaro_n; ++n) {
          CesaroResult cr = cesaro_expectation(q, cesaro_k, n);
          table << n << ',' << 1.0 << ',' << cr.residual << '\n';
        }
        emit_text(table.str(), out_path);
      } else {
        CesaroResult cr = cesaro_expectation(q, cesaro_k, cesaro_n);
        Json j{{"k", cesaro_k},
               {"N", cesaro_n},
               {"residual", cr.residual},
               {"e_k_dim", cr.e_k.target.dim()}};
        emit(j, out_path);
      }
      return 0;
    }
  } catch (const Error& e) {
    if (is_rejection(e.kind())) {
      std::cerr << e.what() << '\n';
      return 2;
    }
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
