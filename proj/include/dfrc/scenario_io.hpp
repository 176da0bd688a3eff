// SPDX-License-Identifier: Apache-2.0
//
// JSON schema for scenarios. Complex numbers are [re, im] pairs; matrices are
// objects {"rows": R, "cols": C, "data": [[re, im], ...]} in row-major order.
//
//   {
//     "config":   { <ScenarioConfig fields> },
//     "channels": { "h_ul": <matrix>, "h_dl": <matrix>,
//                   "f_user": [[re, im], ...], "g_user": [...], "a_irs": [...] }
//   }
#pragma once

#include <fmt/format.h>

#include <filesystem>
#include <set>
#include <type_traits>
#include <string>

#include <json.hpp>

#include "dfrc/scenario.hpp"

namespace dfrc {

using json = nlohmann::json;

/// obj[key] as a number, `fallback` when absent; ConfigError "prefix.key: ..."
/// on a type mismatch.
template <typename T>
T read_number(const json& obj, const std::string& key, const std::string& prefix, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(fmt::format("{}.{}: expected a number", prefix, key));
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer() || (std::is_unsigned_v<T> && !it->is_number_unsigned()))
      throw ConfigError(fmt::format("{}.{}: expected a non-negative integer", prefix, key));
  }
  return it->get<T>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix);

json complex_to_json(cdouble z);
cdouble complex_from_json(const json& j, const std::string& field);
json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const json& j, const std::string& field);
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j, const std::string& field);

json scenario_config_to_json(const ScenarioConfig& cfg);
/// Applies defaults for absent fields and rejects unknown keys. `prefix` is
/// used to name fields in ConfigError messages.
ScenarioConfig scenario_config_from_json(const json& j, const std::string& prefix = "scenario");

json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Parses a JSON document, turning syntax errors into ConfigError with line
/// and column context.
json parse_json_document(const std::string& text, const std::string& source_name);
json read_json_file(const std::filesystem::path& path);

}  // namespace dfrc
