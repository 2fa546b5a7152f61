// End-to-end exercise of the command-line interface through the built
// binary: subcommands, flags, CSV output, and exit codes.

#include "schema_check.hpp"

#include "revpart/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

int failures = 0;

void expect(bool cond, const std::string& what) {
  if (!cond) {
    ++failures;
    std::cerr << "FAILED: " << what << '\n';
  }
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

CommandResult run(const std::string& args, const fs::path& dir,
                  const std::string& label) {
  fs::path out = dir / (label + ".stdout");
  std::string cmd = std::string(REVPART_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + (dir / (label + ".stderr")).string();
  int rc = std::system(cmd.c_str());
  CommandResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  res.out = buf.str();
  return res;
}

}  // namespace

int main() {
  fs::path dir = fs::temp_directory_path() / "revpart_cli_e2e";
  fs::create_directories(dir);
  fs::path deph = dir / "dephasing.json";

  // gen writes a file that validates.
  CommandResult gen = run("gen dephasing --d 2 --p 0.5 --rho 0.6,0.4 --out " +
                              deph.string(),
                          dir, "gen");
  expect(gen.exit_code == 0, "gen exits 0");
  expect(fs::exists(deph), "gen wrote the file");

  // analyze: schema-valid deterministic report.
  CommandResult a1 = run("analyze " + deph.string() + " --seed 11", dir, "a1");
  CommandResult a2 = run("analyze " + deph.string() + " --seed 11", dir, "a2");
  expect(a1.exit_code == 0, "analyze exits 0");
  expect(a1.out == a2.out, "byte-identical reports under one seed");
  Json report = Json::parse(a1.out);
  expect(report["seed"] == 11, "seed echoed");
  expect(report["algebra"]["d_infinity_dim"] == 2, "reversible part dim");
  expect(report["dynamics"]["classification"]["mixing"] == false,
         "dephasing is not mixing");
  {
    std::ifstream schema_in(REVPART_SCHEMA_PATH);
    Json schema;
    schema_in >> schema;
    try {
      schema_check::validate_document(schema, report);
    } catch (const std::exception& e) {
      expect(false, std::string("schema: ") + e.what());
    }
  }

  // decompose: the pinching kills E01.
  CommandResult dec =
      run("decompose " + deph.string() + " --op E01", dir, "dec");
  expect(dec.exit_code == 0, "decompose exits 0");
  Json parts = Json::parse(dec.out);
  revpart::CMat par = revpart::matrix_from_json(parts["par"]);
  revpart::CMat perp = revpart::matrix_from_json(parts["perp"]);
  expect(par.norm() < 1e-10, "decompose par");
  expect((perp - revpart::basis_matrix(2, 0, 1)).norm() < 1e-10,
         "decompose perp");

  // evolve: CSV norms halve per step.
  CommandResult ev = run(
      "evolve " + deph.string() + " --op sigma_x --n 5 --csv", dir, "ev");
  expect(ev.exit_code == 0, "evolve exits 0");
  {
    std::stringstream lines(ev.out);
    std::string header;
    std::getline(lines, header);
    expect(header == "step,norm,residual", "csv header");
    double prev = -1;
    std::string row;
    int count = 0;
    while (std::getline(lines, row)) {
      double norm = std::stod(row.substr(row.find(',') + 1));
      if (prev > 0) expect(std::abs(norm - 0.5 * prev) < 1e-9, "norm halves");
      prev = norm;
      ++count;
    }
    expect(count == 6, "six rows");
  }

  // nagyfoias summary on the unitary fixture.
  fs::path uni = dir / "unitary.json";
  run("gen unitary --d 2 --phase 1.0 --rho 0.6,0.4 --out " + uni.string(), dir,
      "genu");
  CommandResult nf = run("nagyfoias " + uni.string(), dir, "nf");
  expect(nf.exit_code == 0, "nagyfoias exits 0");
  Json nfj = Json::parse(nf.out);
  expect(nfj["dim_h0"] == 4, "unitary h0 dim");
  expect(nfj["dim_h1"] == 0, "unitary h1 dim");

  // cesaro single-shot and CSV table.
  CommandResult ces =
      run("cesaro " + deph.string() + " --k 1 --N 9", dir, "ces");
  expect(ces.exit_code == 0, "cesaro exits 0");
  Json cj = Json::parse(ces.out);
  double closed_form = (1.0 - std::pow(0.25, 10)) / (10.0 * 0.75);
  expect(std::abs(cj["residual"].get<double>() - closed_form) < 1e-9,
         "cesaro closed form");
  CommandResult cescsv =
      run("cesaro " + deph.string() + " --k 1 --N 5 --csv", dir, "cescsv");
  expect(cescsv.out.rfind("step,norm,residual", 0) == 0, "cesaro csv header");

  // Exit-code semantics.
  fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "not json at all";
  expect(run("analyze " + broken.string(), dir, "broken").exit_code == 1,
         "parse failure exits 1");
  expect(run("analyze " + (dir / "missing.json").string(), dir, "missing")
                 .exit_code == 1,
         "missing file exits 1");
  expect(run("decompose " + deph.string() + " --op bogus", dir, "bogus")
                 .exit_code == 1,
         "unknown operator name exits 1");

  // Tolerance override through the environment.
  {
    std::string cmd = std::string("REVPART_TOL=1e-6 ") + REVPART_CLI_PATH +
                      " analyze " + deph.string() + " > " +
                      (dir / "env.stdout").string() + " 2> /dev/null";
    int rc = std::system(cmd.c_str());
    expect(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "env override accepted");
    std::ifstream in(dir / "env.stdout");
    Json j;
    in >> j;
    expect(j["tolerance"]["eq_tol"] == 1e-6, "env override recorded");
  }

  if (failures == 0) std::puts("cli e2e: all checks passed");
  return failures;
}
