#include "revpart/io.hpp"

#include <fstream>
#include <sstream>

namespace revpart {

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::ParseError, "complex scalars are [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json matrix_to_json(const CMat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::ParseError, "matrix must be a non-empty array");
  Eigen::Index rows = Eigen::Index(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw Error(ErrorKind::ParseError, "matrix rows must be arrays");
  Eigen::Index cols = Eigen::Index(j[0].size());
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[size_t(i)].is_array() || Eigen::Index(j[size_t(i)].size()) != cols)
      throw Error(ErrorKind::ParseError, "ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = complex_from_json(j[size_t(i)][size_t(c)]);
  }
  return m;
}

Json real_matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json system_to_json(const SystemSpec& spec) {
  Json j;
  j["dim"] = spec.dim;
  Json channel;
  if (!spec.kraus.empty()) {
    Json ks = Json::array();
    for (const auto& k : spec.kraus) ks.push_back(matrix_to_json(k));
    channel["kraus"] = std::move(ks);
  } else {
    channel["superop"] = matrix_to_json(spec.superop);
  }
  j["channel"] = std::move(channel);
  j["rho"] = matrix_to_json(spec.rho);
  Tolerance def;
  if (spec.tol.eq_tol != def.eq_tol || spec.tol.rank_gap != def.rank_gap ||
      spec.tol.iter_max != def.iter_max || spec.tol.conv_tol != def.conv_tol) {
    j["tolerance"] = Json{{"eq_tol", spec.tol.eq_tol},
                          {"rank_gap", spec.tol.rank_gap},
                          {"iter_max", spec.tol.iter_max},
                          {"conv_tol", spec.tol.conv_tol}};
  }
  return j;
}

SystemSpec system_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw Error(ErrorKind::ParseError, "missing integer field 'dim'");
  if (!j.contains("channel") || !j["channel"].is_object())
    throw Error(ErrorKind::ParseError, "missing object field 'channel'");
  if (!j.contains("rho"))
    throw Error(ErrorKind::ParseError, "missing field 'rho'");

  SystemSpec spec;
  spec.dim = j["dim"].get<Eigen::Index>();
  if (spec.dim < 1) throw Error(ErrorKind::ParseError, "dim must be positive");

  const Json& channel = j["channel"];
  if (channel.contains("kraus")) {
    if (!channel["kraus"].is_array() || channel["kraus"].empty())
      throw Error(ErrorKind::ParseError, "'kraus' must be a non-empty array");
    for (const auto& k : channel["kraus"]) {
      CMat m = matrix_from_json(k);
      if (m.rows() != spec.dim || m.cols() != spec.dim)
        throw Error(ErrorKind::ParseError, "Kraus operator shape mismatch");
      spec.kraus.push_back(std::move(m));
    }
  } else if (channel.contains("superop")) {
    spec.superop = matrix_from_json(channel["superop"]);
    if (spec.superop.rows() != spec.dim * spec.dim ||
        spec.superop.cols() != spec.dim * spec.dim)
      throw Error(ErrorKind::ParseError, "superoperator shape mismatch");
  } else {
    throw Error(ErrorKind::ParseError, "channel needs 'kraus' or 'superop'");
  }

  spec.rho = matrix_from_json(j["rho"]);
  if (spec.rho.rows() != spec.dim || spec.rho.cols() != spec.dim)
    throw Error(ErrorKind::ParseError, "state shape mismatch");

  if (j.contains("tolerance")) {
    const Json& t = j["tolerance"];
    if (!t.is_object())
      throw Error(ErrorKind::ParseError, "'tolerance' must be an object");
    if (t.contains("eq_tol")) spec.tol.eq_tol = t["eq_tol"].get<double>();
    if (t.contains("rank_gap")) spec.tol.rank_gap = t["rank_gap"].get<double>();
    if (t.contains("iter_max")) spec.tol.iter_max = t["iter_max"].get<int>();
    if (t.contains("conv_tol")) spec.tol.conv_tol = t["conv_tol"].get<double>();
    spec.tol.check_valid();
  }
  return spec;
}

SystemSpec read_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
  return system_from_json(j);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot open " + path);
  out << j.dump(2) << '\n';
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace revpart
