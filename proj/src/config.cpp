// SPDX-License-Identifier: Apache-2.0
#include "dfrc/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dfrc {

namespace {

const json& object_or_empty(const json& j, const std::string& key, const std::string& field) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) throw ConfigError(fmt::format("{}: expected an object", field));
  return *it;
}

bool read_bool(const json& obj, const std::string& key, const std::string& prefix, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(fmt::format("{}{}: expected true or false", prefix, key));
  return it->get<bool>();
}

std::string read_string(const json& obj, const std::string& key, const std::string& field) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", field));
  return v.get<std::string>();
}

template <typename T>
std::vector<T> read_number_list(const json& obj, const std::string& key, const std::string& field,
                                std::vector<T> fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array()) throw ConfigError(fmt::format("{}: expected an array of numbers", field));
  std::vector<T> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json wrapper = json{{"v", (*it)[i]}};
    out.push_back(read_number<T>(wrapper, "v", field, T{}));
  }
  return out;
}

// read_number reports "prefix.key"; top-level keys have no prefix.
template <typename T>
T read_top(const json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  const json wrapper = json{{key, *it}};
  try {
    return read_number<T>(wrapper, key, "", fallback);
  } catch (const ConfigError&) {
    throw ConfigError(fmt::format("{}: expected {}", key,
                                  std::is_integral_v<T> ? "a non-negative integer" : "a number"));
  }
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::mm: return "mm";
    case Method::rmo: return "rmo";
    case Method::mbnb: return "mbnb";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "mm") return Method::mm;
  if (s == "rmo") return Method::rmo;
  if (s == "mbnb") return Method::mbnb;
  throw ConfigError(fmt::format("method: unknown method '{}' (expected mm, rmo or mbnb)", s));
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError(fmt::format("output.format: unknown format '{}' (expected csv or json)", s));
}

std::string to_string(SeedMode m) { return m == SeedMode::shared ? "shared" : "per_alpha"; }

SeedMode seed_mode_from_string(const std::string& s) {
  if (s == "shared") return SeedMode::shared;
  if (s == "per_alpha") return SeedMode::per_alpha;
  throw ConfigError(fmt::format("experiment.seed_mode: unknown mode '{}' (expected shared or per_alpha)", s));
}

void RunConfig::validate() const {
  try {
    scenario.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  const auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("{}: must be a positive number", field));
  };
  const auto at_least_one = [](std::size_t v, const char* field) {
    if (v < 1) throw ConfigError(fmt::format("{}: must be >= 1", field));
  };
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError(fmt::format("alpha: {} is outside [0, 1]", alpha));
  positive(outer_tol, "outer_tol");
  at_least_one(outer_max_iter, "outer_max_iter");

  positive(mm.tol, "mm.tol");
  at_least_one(mm.max_iter, "mm.max_iter");

  try {
    rmo.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  at_least_one(rmo.max_iter, "rmo.max_iter");

  positive(mbnb.tol, "mbnb.tol");
  at_least_one(mbnb.max_iter, "mbnb.max_iter");
  positive(mbnb.relative_epsilon, "mbnb.relative_epsilon");
  at_least_one(mbnb.max_nodes, "mbnb.max_nodes");

  positive(precoder.eig_tol, "precoder.eig_tol");
  at_least_one(precoder.eig_max_iter, "precoder.eig_max_iter");
  if (precoder.penalty.rho_schedule.empty()) throw ConfigError("precoder.rho_schedule: must not be empty");
  for (double rho : precoder.penalty.rho_schedule) positive(rho, "precoder.rho_schedule");
  at_least_one(precoder.penalty.max_inner_iter, "precoder.max_inner_iter");
  if (!(precoder.penalty.tol >= 0.0)) throw ConfigError("precoder.penalty_tol: must be >= 0");

  at_least_one(experiment.trials, "experiment.trials");
  at_least_one(experiment.bench_trials, "experiment.bench_trials");
  if (experiment.alphas.empty()) throw ConfigError("experiment.alphas: must not be empty");
  for (double a : experiment.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError(fmt::format("experiment.alphas: {} is outside [0, 1]", a));
  if (experiment.n_list.empty()) throw ConfigError("experiment.n_list: must not be empty");
  if (!std::is_sorted(experiment.n_list.begin(), experiment.n_list.end()))
    throw ConfigError("experiment.n_list: must be sorted ascending");
  for (std::size_t n : experiment.n_list) at_least_one(n, "experiment.n_list");
  if (experiment.bench_methods.empty()) throw ConfigError("experiment.bench_methods: must not be empty");
}

json run_config_to_json(const RunConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.experiment.bench_methods) methods.push_back(to_string(m));
  json out{
      {"scenario", scenario_config_to_json(cfg.scenario)},
      {"method", to_string(cfg.method)},
      {"alpha", cfg.alpha},
      {"outer_tol", cfg.outer_tol},
      {"outer_max_iter", cfg.outer_max_iter},
      {"beampattern_mode", cfg.beampattern_mode},
      {"mm",
       {{"tol", cfg.mm.tol},
        {"max_iter", cfg.mm.max_iter},
        {"shift", cfg.mm.shift == ShiftRule::power ? "power" : "gershgorin"}}},
      {"rmo",
       {{"armijo_initial_step", cfg.rmo.armijo_initial_step},
        {"armijo_shrink", cfg.rmo.armijo_shrink},
        {"armijo_slope", cfg.rmo.armijo_slope},
        {"grad_tol", cfg.rmo.grad_tol ? json(*cfg.rmo.grad_tol) : json(nullptr)},
        {"max_iter", cfg.rmo.max_iter},
        {"objective_tol", cfg.rmo.objective_tol}}},
      {"mbnb",
       {{"tol", cfg.mbnb.tol},
        {"max_iter", cfg.mbnb.max_iter},
        {"relative_epsilon", cfg.mbnb.relative_epsilon},
        {"max_nodes", cfg.mbnb.max_nodes}}},
      {"precoder",
       {{"eig_tol", cfg.precoder.eig_tol},
        {"eig_max_iter", cfg.precoder.eig_max_iter},
        {"rho_schedule", cfg.precoder.penalty.rho_schedule},
        {"max_inner_iter", cfg.precoder.penalty.max_inner_iter},
        {"penalty_tol", cfg.precoder.penalty.tol}}},
      {"experiment",
       {{"trials", cfg.experiment.trials},
        {"alphas", cfg.experiment.alphas},
        {"n_list", cfg.experiment.n_list},
        {"bench_methods", methods},
        {"bench_trials", cfg.experiment.bench_trials},
        {"seed_mode", to_string(cfg.experiment.seed_mode)},
        {"threads", cfg.experiment.threads}}},
      {"output",
       {{"path", cfg.output.path ? json(*cfg.output.path) : json(nullptr)},
        {"format", to_string(cfg.output.format)}}},
  };
  return out;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object at the top level");
  reject_unknown(j,
                 {"scenario", "method", "alpha", "outer_tol", "outer_max_iter", "beampattern_mode", "mm", "rmo",
                  "mbnb", "precoder", "experiment", "output"},
                 "config");
  RunConfig cfg;
  if (j.contains("scenario")) cfg.scenario = scenario_config_from_json(j.at("scenario"), "scenario");
  if (j.contains("method")) cfg.method = method_from_string(read_string(j, "method", "method"));
  cfg.alpha = read_top<double>(j, "alpha", cfg.alpha);
  cfg.outer_tol = read_top<double>(j, "outer_tol", cfg.outer_tol);
  cfg.outer_max_iter = read_top<std::size_t>(j, "outer_max_iter", cfg.outer_max_iter);
  cfg.beampattern_mode = read_bool(j, "beampattern_mode", "", cfg.beampattern_mode);

  const json& mm = object_or_empty(j, "mm", "mm");
  reject_unknown(mm, {"tol", "max_iter", "shift"}, "mm");
  cfg.mm.tol = read_number<double>(mm, "tol", "mm", cfg.mm.tol);
  cfg.mm.max_iter = read_number<std::size_t>(mm, "max_iter", "mm", cfg.mm.max_iter);
  if (mm.contains("shift")) {
    const std::string rule = read_string(mm, "shift", "mm.shift");
    if (rule == "gershgorin") {
      cfg.mm.shift = ShiftRule::gershgorin;
    } else if (rule == "power") {
      cfg.mm.shift = ShiftRule::power;
    } else {
      throw ConfigError(fmt::format("mm.shift: unknown rule '{}' (expected gershgorin or power)", rule));
    }
  }

  const json& rmo = object_or_empty(j, "rmo", "rmo");
  reject_unknown(rmo, {"armijo_initial_step", "armijo_shrink", "armijo_slope", "grad_tol", "max_iter", "objective_tol"},
                 "rmo");
  cfg.rmo.armijo_initial_step = read_number<double>(rmo, "armijo_initial_step", "rmo", cfg.rmo.armijo_initial_step);
  cfg.rmo.armijo_shrink = read_number<double>(rmo, "armijo_shrink", "rmo", cfg.rmo.armijo_shrink);
  cfg.rmo.armijo_slope = read_number<double>(rmo, "armijo_slope", "rmo", cfg.rmo.armijo_slope);
  if (rmo.contains("grad_tol") && !rmo.at("grad_tol").is_null())
    cfg.rmo.grad_tol = read_number<double>(rmo, "grad_tol", "rmo", 0.0);
  cfg.rmo.max_iter = read_number<std::size_t>(rmo, "max_iter", "rmo", cfg.rmo.max_iter);
  cfg.rmo.objective_tol = read_number<double>(rmo, "objective_tol", "rmo", cfg.rmo.objective_tol);

  const json& mbnb = object_or_empty(j, "mbnb", "mbnb");
  reject_unknown(mbnb, {"tol", "max_iter", "relative_epsilon", "max_nodes"}, "mbnb");
  cfg.mbnb.tol = read_number<double>(mbnb, "tol", "mbnb", cfg.mbnb.tol);
  cfg.mbnb.max_iter = read_number<std::size_t>(mbnb, "max_iter", "mbnb", cfg.mbnb.max_iter);
  cfg.mbnb.relative_epsilon = read_number<double>(mbnb, "relative_epsilon", "mbnb", cfg.mbnb.relative_epsilon);
  cfg.mbnb.max_nodes = read_number<std::size_t>(mbnb, "max_nodes", "mbnb", cfg.mbnb.max_nodes);

  const json& pre = object_or_empty(j, "precoder", "precoder");
  reject_unknown(pre, {"eig_tol", "eig_max_iter", "rho_schedule", "max_inner_iter", "penalty_tol"}, "precoder");
  cfg.precoder.eig_tol = read_number<double>(pre, "eig_tol", "precoder", cfg.precoder.eig_tol);
  cfg.precoder.eig_max_iter = read_number<std::size_t>(pre, "eig_max_iter", "precoder", cfg.precoder.eig_max_iter);
  cfg.precoder.penalty.rho_schedule =
      read_number_list<double>(pre, "rho_schedule", "precoder.rho_schedule", cfg.precoder.penalty.rho_schedule);
  cfg.precoder.penalty.max_inner_iter =
      read_number<std::size_t>(pre, "max_inner_iter", "precoder", cfg.precoder.penalty.max_inner_iter);
  cfg.precoder.penalty.tol = read_number<double>(pre, "penalty_tol", "precoder", cfg.precoder.penalty.tol);

  const json& ex = object_or_empty(j, "experiment", "experiment");
  reject_unknown(ex, {"trials", "alphas", "n_list", "bench_methods", "bench_trials", "seed_mode", "threads"}, "experiment");
  cfg.experiment.trials = read_number<std::size_t>(ex, "trials", "experiment", cfg.experiment.trials);
  cfg.experiment.alphas = read_number_list<double>(ex, "alphas", "experiment.alphas", cfg.experiment.alphas);
  cfg.experiment.n_list = read_number_list<std::size_t>(ex, "n_list", "experiment.n_list", cfg.experiment.n_list);
  if (ex.contains("bench_methods")) {
    const auto& arr = ex.at("bench_methods");
    if (!arr.is_array()) throw ConfigError("experiment.bench_methods: expected an array of method names");
    cfg.experiment.bench_methods.clear();
    for (const auto& m : arr) {
      if (!m.is_string()) throw ConfigError("experiment.bench_methods: expected an array of method names");
      cfg.experiment.bench_methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  cfg.experiment.bench_trials = read_number<std::size_t>(ex, "bench_trials", "experiment", cfg.experiment.bench_trials);
  if (ex.contains("seed_mode"))
    cfg.experiment.seed_mode = seed_mode_from_string(read_string(ex, "seed_mode", "experiment.seed_mode"));
  cfg.experiment.threads = read_number<std::size_t>(ex, "threads", "experiment", cfg.experiment.threads);

  const json& out = object_or_empty(j, "output", "output");
  reject_unknown(out, {"path", "format"}, "output");
  if (out.contains("path") && !out.at("path").is_null()) cfg.output.path = read_string(out, "path", "output.path");
  if (out.contains("format")) cfg.output.format = output_format_from_string(read_string(out, "format", "output.format"));

  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) { return run_config_from_json(read_json_file(path)); }

}  // namespace dfrc
