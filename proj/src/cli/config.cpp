#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "minidiss/cli.hpp"

namespace minidiss::cli {

using nlohmann::json;

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::jaynes_cummings: return "jaynes_cummings";
    case ModelKind::dephasing: return "dephasing";
    case ModelKind::custom_gksl: return "custom_gksl";
  }
  return "unknown";
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",       "U",       "W",           "Q",          "dS",
      "Sigma",   "sigma",   "sigma_weak",  "gamma_1",    "gamma_2",
      "gamma_3", "delta_omega", "fixed_point_residual", "pdiv_witness", "td_flow"};
  return cols;
}

std::map<std::string, double> default_params(ModelKind m) {
  switch (m) {
    case ModelKind::jaynes_cummings:
      return {{"omega0", 1.0}, {"omega", 0.9}, {"g", 0.1},         {"kT", 1.0},
              {"m_trunc", 60}, {"rho11_0", 0.25}, {"rho10_0", 0.0}};
    case ModelKind::dephasing:
      return {{"omega0", 1.0}, {"omega", 1.0},   {"g", 0.1},       {"kT", 1.0},
              {"m_trunc", 60}, {"rho11_0", 0.5}, {"rho10_0", 0.3}};
    case ModelKind::custom_gksl:
      return {{"omega0", 1.0}, {"gamma0", 0.05}, {"gamma_z", 0.0}, {"kT", 1.0},
              {"rho11_0", 0.25}, {"rho10_0", 0.0}};
  }
  return {};
}

namespace {

ModelKind parse_model(const std::string& s) {
  if (s == "jaynes_cummings") return ModelKind::jaynes_cummings;
  if (s == "dephasing") return ModelKind::dephasing;
  if (s == "custom_gksl") return ModelKind::custom_gksl;
  throw ConfigError("unknown model '" + s + "' (expected jaynes_cummings, dephasing or custom_gksl)");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

int count(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (x < 0 || x != std::floor(x) || x > 1e9)
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  return static_cast<int>(x);
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"model", "params", "grid", "outputs", "checks", "seed"}, "config");
  RunConfig cfg;

  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ConfigError("'model' must be a string");
    cfg.model = parse_model(j["model"].get<std::string>());
    cfg.params = default_params(*cfg.model);
  }
  if (j.contains("params")) {
    if (!cfg.model) throw ConfigError("'params' given without a model");
    if (!j["params"].is_object()) throw ConfigError("'params' must be an object");
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
      if (!cfg.params.count(it.key()))
        throw ConfigError("params: '" + it.key() + "' is not a parameter of " + to_string(*cfg.model));
      cfg.params[it.key()] = number(it.value(), it.key());
    }
  }
  if (cfg.params.count("m_trunc")) {
    const double m = cfg.params["m_trunc"];
    if (m != std::floor(m) || m < 2) throw ConfigError("params: m_trunc must be an integer >= 2");
  }
  if (cfg.params.count("kT") && !(cfg.params["kT"] > 0.0))
    throw ConfigError("params: kT must be positive (thermodynamics needs a finite beta)");

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object");
    reject_unknown(g, {"t_max", "dt"}, "grid");
    if (g.contains("t_max")) cfg.grid.t_max = number(g["t_max"], "t_max");
    if (g.contains("dt")) cfg.grid.dt = number(g["dt"], "dt");
  }
  if (!(cfg.grid.t_max > 0.0) || !(cfg.grid.dt > 0.0))
    throw ConfigError("grid: t_max and dt must be positive");
  if (cfg.grid.dt > cfg.grid.t_max / 100.0 * (1.0 + 1e-12))
    throw ConfigError("grid: dt must not exceed t_max / 100");

  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) throw ConfigError("'outputs' must be an array of column names");
    const auto& all = csv_columns();
    std::set<std::string> wanted;
    for (const auto& c : j["outputs"]) {
      if (!c.is_string()) throw ConfigError("'outputs' entries must be strings");
      const std::string name = c.get<std::string>();
      if (std::find(all.begin(), all.end(), name) == all.end())
        throw ConfigError("outputs: unknown column '" + name + "'");
      wanted.insert(name);
    }
    wanted.insert("t");
    for (const auto& c : all)
      if (wanted.count(c)) cfg.outputs.push_back(c);
  } else {
    cfg.outputs = csv_columns();
  }

  if (j.contains("checks")) {
    const json& c = j["checks"];
    if (!c.is_object()) throw ConfigError("'checks' must be an object");
    reject_unknown(c, {"minimality_trials", "witness_samples", "mc_haar_samples", "forced_bug"},
                   "checks");
    if (c.contains("minimality_trials"))
      cfg.checks.minimality_trials = count(c["minimality_trials"], "minimality_trials");
    if (c.contains("witness_samples"))
      cfg.checks.witness_samples = count(c["witness_samples"], "witness_samples");
    if (c.contains("mc_haar_samples"))
      cfg.checks.mc_haar_samples = count(c["mc_haar_samples"], "mc_haar_samples");
    if (c.contains("forced_bug")) {
      if (!c["forced_bug"].is_boolean()) throw ConfigError("'forced_bug' must be a boolean");
      cfg.checks.forced_bug = c["forced_bug"].get<bool>();
    }
    if (cfg.checks.mc_haar_samples < 2) throw ConfigError("checks: mc_haar_samples must be >= 2");
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return j;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

}  // namespace minidiss::cli
