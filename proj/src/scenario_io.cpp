// SPDX-License-Identifier: Apache-2.0
#include "dfrc/scenario_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

namespace dfrc {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.contains(it.key())) throw ConfigError(fmt::format("{}.{}: unknown key", prefix, it.key()));
}

namespace {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json complex_to_json(cdouble z) { return json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(fmt::format("{}: expected a [re, im] pair", field));
  return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const ComplexVector& v) {
  json arr = json::array();
  for (const auto& z : v) arr.push_back(complex_to_json(z));
  return arr;
}

ComplexVector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(fmt::format("{}: expected an array of [re, im] pairs", field));
  ComplexVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i], fmt::format("{}[{}]", field, i));
  return v;
}

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (const auto& z : m.data()) data.push_back(complex_to_json(z));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected a matrix object", field));
  reject_unknown(j, {"rows", "cols", "data"}, field);
  const auto rows = read_number<std::size_t>(j, "rows", field, 0);
  const auto cols = read_number<std::size_t>(j, "cols", field, 0);
  if (!j.contains("data") || !j["data"].is_array() || j["data"].size() != rows * cols)
    throw ConfigError(fmt::format("{}.data: expected {} entries", field, rows * cols));
  ComplexMatrix m(rows, cols);
  const auto& data = j["data"];
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(data[r * cols + c], fmt::format("{}.data[{}]", field, r * cols + c));
  return m;
}

json scenario_config_to_json(const ScenarioConfig& cfg) {
  return json{
      {"n_tx", cfg.n_tx},
      {"n_rx", cfg.n_rx},
      {"n_irs", cfg.n_irs()},
      {"irs_rows", cfg.irs_rows},
      {"irs_cols", cfg.irs_cols},
      {"element_spacing", cfg.element_spacing},
      {"target_azimuth", cfg.target_azimuth},
      {"target_elevation", cfg.target_elevation},
      {"power_budget", cfg.power_budget},
      {"radar_noise_power", cfg.radar_noise_power},
      {"user_noise_power", cfg.user_noise_power},
      {"cascaded_gain", complex_to_json(cfg.cascaded_gain)},
      {"irs_pathloss", cfg.irs_pathloss},
      {"beampattern_threshold", cfg.beampattern_threshold},
      {"desired_angles", cfg.desired_angles},
      {"rng_seed", cfg.rng_seed},
  };
}

ScenarioConfig scenario_config_from_json(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", prefix));
  reject_unknown(j,
                 {"n_tx", "n_rx", "n_irs", "irs_rows", "irs_cols", "element_spacing", "target_azimuth",
                  "target_elevation", "power_budget", "power_budget_dbm", "radar_noise_power",
                  "user_noise_power", "cascaded_gain", "irs_pathloss", "beampattern_threshold",
                  "desired_angles", "rng_seed"},
                 prefix);
  ScenarioConfig cfg;
  cfg.n_tx = read_number<std::size_t>(j, "n_tx", prefix, cfg.n_tx);
  cfg.n_rx = read_number<std::size_t>(j, "n_rx", prefix, cfg.n_rx);

  const bool has_rows = j.contains("irs_rows");
  const bool has_cols = j.contains("irs_cols");
  if (has_rows != has_cols)
    throw ConfigError(fmt::format("{}.irs_rows: irs_rows and irs_cols must be given together", prefix));
  if (has_rows) {
    cfg.irs_rows = read_number<std::size_t>(j, "irs_rows", prefix, cfg.irs_rows);
    cfg.irs_cols = read_number<std::size_t>(j, "irs_cols", prefix, cfg.irs_cols);
    if (j.contains("n_irs") && read_number<std::size_t>(j, "n_irs", prefix, 0) != cfg.n_irs())
      throw ConfigError(fmt::format("{}.n_irs: must equal irs_rows * irs_cols", prefix));
  } else if (j.contains("n_irs")) {
    const auto n = read_number<std::size_t>(j, "n_irs", prefix, 0);
    if (n < 1) throw ConfigError(fmt::format("{}.n_irs: must be >= 1", prefix));
    std::tie(cfg.irs_rows, cfg.irs_cols) = factor_grid(n);
  }

  cfg.element_spacing = read_number<double>(j, "element_spacing", prefix, cfg.element_spacing);
  cfg.target_azimuth = read_number<double>(j, "target_azimuth", prefix, cfg.target_azimuth);
  cfg.target_elevation = read_number<double>(j, "target_elevation", prefix, cfg.target_elevation);
  if (j.contains("power_budget") && j.contains("power_budget_dbm"))
    throw ConfigError(fmt::format("{}.power_budget: give either power_budget or power_budget_dbm", prefix));
  cfg.power_budget = read_number<double>(j, "power_budget", prefix, cfg.power_budget);
  if (j.contains("power_budget_dbm"))
    cfg.power_budget = dbm_to_watts(read_number<double>(j, "power_budget_dbm", prefix, 30.0));
  cfg.radar_noise_power = read_number<double>(j, "radar_noise_power", prefix, cfg.radar_noise_power);
  cfg.user_noise_power = read_number<double>(j, "user_noise_power", prefix, cfg.user_noise_power);
  if (j.contains("cascaded_gain")) {
    const auto& g = j["cascaded_gain"];
    cfg.cascaded_gain = g.is_number() ? cdouble{g.get<double>(), 0.0}
                                      : complex_from_json(g, prefix + ".cascaded_gain");
  }
  cfg.irs_pathloss = read_number<double>(j, "irs_pathloss", prefix, cfg.irs_pathloss);
  cfg.beampattern_threshold = read_number<double>(j, "beampattern_threshold", prefix, cfg.beampattern_threshold);
  if (j.contains("desired_angles")) {
    const auto& a = j["desired_angles"];
    if (!a.is_array()) throw ConfigError(fmt::format("{}.desired_angles: expected an array", prefix));
    cfg.desired_angles.clear();
    for (const auto& x : a) {
      if (!x.is_number()) throw ConfigError(fmt::format("{}.desired_angles: expected numbers", prefix));
      cfg.desired_angles.push_back(x.get<double>());
    }
  }
  cfg.rng_seed = read_number<std::uint64_t>(j, "rng_seed", prefix, cfg.rng_seed);

  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

json scenario_to_json(const Scenario& s) {
  const auto& c = s.channels;
  return json{
      {"config", scenario_config_to_json(s.config)},
      {"channels",
       {{"h_ul", matrix_to_json(c.h_ul)},
        {"h_dl", matrix_to_json(c.h_dl)},
        {"f_user", vector_to_json(c.f_user)},
        {"g_user", vector_to_json(c.g_user)},
        {"a_irs", vector_to_json(c.a_irs)}}},
  };
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario document: expected an object");
  reject_unknown(j, {"config", "channels"}, "scenario document");
  if (!j.contains("config") || !j.contains("channels"))
    throw ConfigError("scenario document: requires \"config\" and \"channels\"");
  Scenario s;
  s.config = scenario_config_from_json(j["config"], "config");
  const auto& ch = j["channels"];
  if (!ch.is_object()) throw ConfigError("channels: expected an object");
  reject_unknown(ch, {"h_ul", "h_dl", "f_user", "g_user", "a_irs"}, "channels");
  for (const char* key : {"h_ul", "h_dl", "f_user", "g_user", "a_irs"})
    if (!ch.contains(key)) throw ConfigError(fmt::format("channels.{}: missing", key));
  s.channels.h_ul = matrix_from_json(ch["h_ul"], "channels.h_ul");
  s.channels.h_dl = matrix_from_json(ch["h_dl"], "channels.h_dl");
  s.channels.f_user = vector_from_json(ch["f_user"], "channels.f_user");
  s.channels.g_user = vector_from_json(ch["g_user"], "channels.g_user");
  s.channels.a_irs = vector_from_json(ch["a_irs"], "channels.a_irs");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << scenario_to_json(s).dump(2) << '\n';
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

json parse_json_document(const std::string& text, const std::string& source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(fmt::format("{}:{}:{}: parse error: {}", source_name, line, col, e.what()));
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_document(buf.str(), path.string());
}

}  // namespace dfrc
