#pragma once

// Minimal structural validator for the subset of JSON Schema used by
// docs/report.schema.json: type, required, properties, items, enum, $ref
// into #/definitions. Test-only.

#include "json.hpp"

#include <string>

namespace schema_check {

using Json = nlohmann::json;

inline const Json& resolve(const Json& schema, const Json& root) {
  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0)
      throw std::runtime_error("unsupported $ref " + ref);
    return root.at("definitions").at(ref.substr(prefix.size()));
  }
  return schema;
}

inline bool type_matches(const std::string& type, const Json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "number") return value.is_number();
  throw std::runtime_error("unsupported type " + type);
}

inline void validate(const Json& schema_in, const Json& value, const Json& root,
                     const std::string& path) {
  const Json& schema = resolve(schema_in, root);
  if (schema.contains("type") &&
      !type_matches(schema["type"].get<std::string>(), value))
    throw std::runtime_error(path + ": expected " +
                             schema["type"].get<std::string>());
  if (schema.contains("enum")) {
    bool hit = false;
    for (const auto& option : schema["enum"]) hit = hit || option == value;
    if (!hit) throw std::runtime_error(path + ": value not in enum");
  }
  if (schema.contains("required"))
    for (const auto& key : schema["required"])
      if (!value.contains(key.get<std::string>()))
        throw std::runtime_error(path + ": missing " + key.get<std::string>());
  if (schema.contains("properties") && value.is_object())
    for (auto it = schema["properties"].begin(); it != schema["properties"].end();
         ++it)
      if (value.contains(it.key()))
        validate(it.value(), value[it.key()], root, path + "/" + it.key());
  if (schema.contains("items") && value.is_array())
    for (size_t i = 0; i < value.size(); ++i)
      validate(schema["items"], value[i], root,
               path + "[" + std::to_string(i) + "]");
}

inline void validate_document(const Json& schema, const Json& value) {
  validate(schema, value, schema, "$");
}

}  // namespace schema_check
