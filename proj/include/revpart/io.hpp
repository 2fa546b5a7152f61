#pragma once

#include "revpart/generators.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace revpart {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

// Complex scalars are 2-element arrays [re, im]; matrices are row-major
// nested arrays of them.
Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const CMat& m);
CMat matrix_from_json(const Json& j);
Json real_matrix_to_json(const Eigen::MatrixXd& m);

// System file: {"dim": d, "channel": {"kraus": ...} | {"superop": ...},
// "rho": matrix, "tolerance": optional overrides}.
Json system_to_json(const SystemSpec& spec);
SystemSpec system_from_json(const Json& j);

SystemSpec read_system_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
std::string dump_report(const Json& j);

}  // namespace revpart
