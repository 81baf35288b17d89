#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "minidiss/cli.hpp"

namespace minidiss::cli {

namespace {

struct Worst {
  double value = 0.0;
  int index = 0;
};

template <class F>
Worst worst_of(int n, F f) {
  Worst w;
  for (int m = 0; m < n; ++m) {
    const double v = f(m);
    if (v > w.value) w = {v, m};
  }
  return w;
}

int param_int(const std::map<std::string, double>& p, const std::string& key) {
  return static_cast<int>(std::lround(p.at(key)));
}

TotalModel build_model(ModelKind kind, const std::map<std::string, double>& p, int m_trunc) {
  if (kind == ModelKind::jaynes_cummings) {
    JCParams jc;
    jc.omega0 = p.at("omega0");
    jc.omega = p.at("omega");
    jc.g = p.at("g");
    jc.kT = p.at("kT");
    jc.m_trunc = m_trunc;
    return build_jaynes_cummings(jc);
  }
  DephasingParams dp{p.at("omega0"), p.at("omega"), p.at("g"), p.at("kT"), m_trunc};
  return build_dephasing(dp);
}

ThermalQubitParams gksl_params(const std::map<std::string, double>& p) {
  return {p.at("omega0"), p.at("gamma0"), p.at("gamma_z"), p.at("kT")};
}

Operator initial_state(const std::map<std::string, double>& p) {
  Operator rho(2, 2);
  const double r11 = p.at("rho11_0");
  const double r10 = p.at("rho10_0");
  rho << 1.0 - r11, r10, r10, r11;
  try {
    return DensityMatrix(rho).op();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("initial state: ") + e.what());
  }
}

// max over every `every`-th interior coarse sample of |X_coarse - X_fine| for
// K and the Kossakowski matrix; the endpoints use one-sided stencils of a
// different order
std::pair<double, double> refinement_gap(const GeneratorTrajectory& coarse,
                                         const GeneratorTrajectory& fine, int every = 1) {
  const int stride = fine.grid.steps / coarse.grid.steps;
  double dk = 0.0, dr = 0.0;
  for (int m = every; m + 1 < coarse.grid.size(); m += every) {
    if (!coarse.valid[m] || !fine.valid[m * stride]) continue;
    const auto& a = coarse.splits[m];
    const auto& b = fine.splits[m * stride];
    dk = std::max(dk, max_abs(a.k_eff - b.k_eff));
    dr = std::max(dr, max_abs(a.kossakowski() - b.kossakowski()));
  }
  return {dk, dr};
}

void ratio_entry(Report& rep, const std::string& key, double coarse_gap, double fine_gap) {
  // unresolved gaps carry no information (e.g. the decoupled limit)
  if (fine_gap < 1e-8) {
    rep.info(key, NAN);
    return;
  }
  const double r = coarse_gap / fine_gap;
  const bool ok = std::abs(r - 4.0) <= 0.5;
  rep.add(key, {r, 0.5, ok, ok ? "ok" : "fail", NAN});
}

}  // namespace

RunResult run_scenario(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("config has no model");
  const ModelKind kind = *cfg.model;
  const auto& p = cfg.params;
  const TimeGrid grid = TimeGrid::uniform(cfg.grid.t_max, cfg.grid.dt);
  const double tol2 = 10.0 * grid.dt * grid.dt;
  const double omega0 = p.at("omega0");
  const double beta = 1.0 / p.at("kT");
  const Operator h_s = omega0 * sigma_plus() * sigma_minus();
  const Operator rho0 = initial_state(p);

  RunResult res;
  Report& rep = res.report;
  rep.info("seed", static_cast<double>(cfg.seed));

  MapTrajectory maps;
  GeneratorTrajectory gen;
  nlohmann::ordered_json truncation = nullptr;
  if (kind == ModelKind::custom_gksl) {
    const SuperOperator l = thermal_qubit_generator(gksl_params(p));
    maps = semigroup_trajectory(l, grid);
    gen = generator_trajectory(grid, std::vector<SuperOperator>(grid.size(), l));
  } else {
    // self-convergence in the truncation on a coarse grid; the stepping is
    // exact for these time-independent models, so the grid does not matter
    int m = param_int(p, "m_trunc");
    const int coarse_steps = std::min(grid.steps, 50);
    const TimeGrid coarse{grid.t_max() / coarse_steps, coarse_steps};
    int doublings = 0;
    double defect = 0.0;
    for (;;) {
      defect = max_map_difference(propagate_total(build_model(kind, p, m), coarse),
                                  propagate_total(build_model(kind, p, 2 * m), coarse));
      if (defect <= 1e-8 || doublings == 3) break;
      m *= 2;
      ++doublings;
    }
    rep.upper("truncation_doubling_defect", defect, 1e-8);
    maps = propagate_total(build_model(kind, p, m), grid);
    gen = generator_from_maps(maps);
    truncation = {{"m_trunc_requested", param_int(p, "m_trunc")},
                  {"m_trunc_used", m},
                  {"doublings", doublings},
                  {"thermal_tail", maps.thermal_tail},
                  {"max_leakage", maps.max_leakage}};
  }
  const int n = grid.size();

  // dynamical maps
  const Worst choi = worst_of(n, [&](int m) {
    return std::max(0.0, -hermitian_eigenvalues(choi_of(maps.maps[m])).minCoeff());
  });
  rep.upper("map_choi_negativity", choi.value, 1e-8, grid.time(choi.index));
  const Worst tp = worst_of(n, [&](int m) {
    return (maps.maps[m] - SuperOperator::identity(2)).trace_defect();
  });
  rep.upper("map_trace_defect", tp.value, 1e-9, grid.time(tp.index));
  rep.upper("generator_htp_defect", gen.max_htp_defect, 1e-8);
  rep.upper("singular_samples", static_cast<double>(gen.singular_indices.size()), 0.0,
            gen.singular_indices.empty() ? NAN : grid.time(gen.singular_indices.front()));
  if (!gen.all_valid())
    throw NumericalError("singular dynamical map at t = " +
                         format_double(grid.time(gen.singular_indices.front())) +
                         "; thermodynamics needs an invertible map at every sample");

  // thermodynamics
  const std::vector<Operator> rhos = maps.evolve(rho0);
  const ThermoTrajectory th = thermodynamics(gen, rhos, beta, h_s);
  auto series_check = [&](const std::string& key, double tol, auto f) {
    const Worst w = worst_of(n, f);
    rep.upper(key, w.value, tol, grid.time(w.index));
  };
  series_check("first_law_max_defect", tol2,
               [&](int m) { return std::abs(th.u[m] - th.u[0] - th.w[m] - th.q[m]); });
  series_check("heat_route_max_defect", tol2,
               [&](int m) { return std::abs(th.q[m] - th.q_state_route[m]); });
  series_check("sigma_definition_defect", 1e-12, [&](int m) {
    return std::abs(th.sigma[m] - (th.ds[m] - beta * th.q[m]));
  });
  series_check("entropy_route_max_defect", tol2,
               [&](int m) { return std::abs(th.sigma[m] - th.sigma_relative_entropy[m]); });
  {
    const std::vector<double> d = differentiate(th.sigma, grid.dt);
    series_check("entropy_rate_max_defect", tol2, [&](int m) {
      return m == 0 || m == n - 1 ? 0.0 : std::abs(d[m] - th.sigma_rate[m]);
    });
  }
  rep.info("sigma_weak_max_gap", worst_of(n, [&](int m) {
             return std::abs(th.sigma_rate[m] - th.sigma_weak[m]);
           }).value);

  // minimality of the split at a few sample times
  {
    int sampled = 0, violations = 0, strict = 0;
    double min_margin = 0.0, pyth = 0.0;
    for (int k = 1; k <= 5 && cfg.checks.minimality_trials > 0; ++k) {
      const int m = k * (n - 1) / 5;
      if (gen.splits[m].terms.empty()) continue;
      const MinimalityReport mr =
          verify_minimality(gen.splits[m], cfg.checks.minimality_trials, cfg.seed + m);
      min_margin = sampled ? std::min(min_margin, mr.min_margin) : mr.min_margin;
      ++sampled;
      violations += mr.violations;
      strict += mr.strict_failures;
      pyth = std::max(pyth, mr.max_pythagoras_defect / std::max(1.0, mr.base_norm * mr.base_norm));
    }
    rep.info("minimality_sampled_times", sampled);
    rep.upper("minimality_violations", violations, 0.0);
    rep.upper("minimality_strict_failures", strict, 0.0);
    rep.upper("minimality_pythagoras_defect", pyth, 1e-9);
    if (sampled) rep.lower("minimality_min_margin", min_margin, -1e-10);
  }

  // divisibility and the conditional second law
  const std::vector<double> witness =
      p_divisibility_witness(maps, cfg.checks.witness_samples, cfg.seed);
  const SecondLawReport sl = second_law_check(th, witness);
  rep.info("second_law_checked_samples", sl.checked);
  rep.upper("second_law_violations", sl.violations, 0.0);
  rep.info("negative_sigma_events", sl.negative_rate_events);
  rep.info("gated_negative_sigma_events", sl.gated_events);
  rep.upper("second_law_counterexamples", sl.counterexamples, 0.0);
  rep.info("pdiv_witness_min", [&] {
    double w = 0.0;
    for (double x : witness)
      if (!std::isnan(x)) w = std::min(w, x);
    return w;
  }());

  // channel structure and rates
  std::vector<std::array<double, 3>> rates(n);
  for (int m = 0; m < n; ++m) rates[m] = qubit_channel_rates(gen.splits[m]);
  const JCStructureReport structure = expected_jc_structure(gen.splits, omega0);
  if (kind == ModelKind::jaynes_cummings) {
    rep.upper("jc_k_offdiagonal", structure.max_k_offdiagonal, 1e-8);
    rep.upper("jc_channel_mixing", structure.max_channel_mixing, 1e-8);
    rep.upper("jc_channel_leak", structure.max_channel_leak, 1e-8);
    rep.upper("jc_delta_omega0", std::abs(structure.delta_omega0), 1e-6, 0.0);
  } else if (kind == ModelKind::dephasing) {
    const DephasingParams dp{omega0, p.at("omega"), p.at("g"), p.at("kT"), param_int(p, "m_trunc")};
    rep.upper("dephasing_k_offdiagonal", structure.max_k_offdiagonal, 1e-8);
    series_check("dephasing_channel_leak", 1e-8, [&](int m) {
      return std::max({std::abs(rates[m][0]), std::abs(rates[m][1]),
                       qubit_channel_mixing(gen.splits[m])});
    });
    series_check("dephasing_rate_max_deviation", 1e-5, [&](int m) {
      const double t = grid.time(m);
      if (dephasing_coherence_factor(dp, t) <= 1e-3) return 0.0;
      return std::abs(rates[m][2] - dephasing_rate(dp, t));
    });
  } else {
    series_check("fixed_point_residual_max", 1e-12,
                 [&](int m) { return th.fixed_point_residual[m]; });
    const auto lo = std::min_element(th.sigma_rate.begin(), th.sigma_rate.end());
    rep.lower("sigma_min", *lo, -1e-9, grid.time(static_cast<int>(lo - th.sigma_rate.begin())));
  }

  // grid refinement: dt, 2 dt and 4 dt from the same maps
  if (kind != ModelKind::custom_gksl && grid.steps % 4 == 0 && grid.steps >= 12) {
    const GeneratorTrajectory g2 = generator_from_maps(subsample(maps, 2));
    const GeneratorTrajectory g4 = generator_from_maps(subsample(maps, 4));
    // gap(4dt, 2dt) / gap(2dt, dt), both on the 4dt samples
    const auto [k42, r42] = refinement_gap(g4, g2);
    const auto [k2f, r2f] = refinement_gap(g2, gen, 2);
    ratio_entry(rep, "convergence_ratio_k", k42, k2f);
    ratio_entry(rep, "convergence_ratio_rates", r42, r2f);
  }

  // trajectory columns
  const TraceDistanceFlow flow = trace_distance_flow(
      maps, DensityMatrix(0.5 * (identity(2) + sigma_x())), DensityMatrix(0.5 * (identity(2) - sigma_x())));
  std::map<std::string, std::vector<double>> col;
  for (int m = 0; m < n; ++m) {
    col["t"].push_back(grid.time(m));
    col["gamma_1"].push_back(rates[m][0]);
    col["gamma_2"].push_back(rates[m][1]);
    col["gamma_3"].push_back(rates[m][2]);
  }
  col["U"] = th.u;
  col["W"] = th.w;
  col["Q"] = th.q;
  col["dS"] = th.ds;
  col["Sigma"] = th.sigma;
  col["sigma"] = th.sigma_rate;
  col["sigma_weak"] = th.sigma_weak;
  col["delta_omega"] = structure.delta_omega;
  col["fixed_point_residual"] = th.fixed_point_residual;
  col["pdiv_witness"] = witness;
  col["td_flow"] = flow.derivative;
  for (const auto& c : cfg.outputs) {
    res.columns.push_back(c);
    res.data.push_back(col.at(c));
  }

  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p) params[k] = v;
  std::vector<double> singular_times;
  for (int i : gen.singular_indices) singular_times.push_back(grid.time(i));
  res.meta = {{"model", to_string(kind)},
              {"params", params},
              {"seed", cfg.seed},
              {"grid", {{"t_max", grid.t_max()}, {"dt", grid.dt}, {"steps", grid.steps}}},
              {"truncation", truncation},
              {"singular_times", singular_times},
              {"columns", res.columns},
              {"rate_channels", {{"gamma_1", "sigma_minus"}, {"gamma_2", "sigma_plus"}, {"gamma_3", "sigma_z"}}},
              {"checks",
               {{"minimality_trials", cfg.checks.minimality_trials},
                {"witness_samples", cfg.checks.witness_samples}}},
              {"versions",
               {{"minidiss", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION)},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};

  const std::string failed = rep.first_failure();
  if (!failed.empty()) {
    const CheckEntry& e = rep.at(failed);
    res.diagnostic = "check '" + failed + "' failed: value " + format_double(e.value) +
                     " vs tolerance " + format_double(e.tolerance);
    if (std::isfinite(e.time)) res.diagnostic += " at t = " + format_double(e.time);
  }
  return res;
}

void write_run(const RunResult& r, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  write_csv(out / "trajectory.csv", r.columns, r.data);
  std::ofstream(out / "report.json") << r.report.to_json().dump(2) << "\n";
  std::ofstream(out / "meta.json") << r.meta.dump(2) << "\n";
}

namespace {

template <class F>
int guarded(F body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

int command_run(const std::filesystem::path& config, const std::filesystem::path& out) {
  return guarded([&] {
    const RunConfig cfg = load_config(config);
    const RunResult r = run_scenario(cfg);
    write_run(r, out);
    if (!r.diagnostic.empty()) {
      std::cerr << r.diagnostic << "\n";
      return static_cast<int>(kNumerical);
    }
    return static_cast<int>(kOk);
  });
}

int command_sweep(const std::filesystem::path& config, const std::string& param,
                  const std::vector<double>& values, const std::filesystem::path& out) {
  return guarded([&] {
    const nlohmann::json base = read_json(config);
    if (values.empty()) throw ConfigError("sweep: no values given");
    std::vector<RunConfig> cfgs;
    for (double v : values) {
      nlohmann::json j = base;
      j["params"][param] = v;
      cfgs.push_back(parse_config(j));
    }
    std::vector<double> vals, codes, first_law, weak_gap;
    int worst = kOk;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%.10g", param.c_str(), values[i]);
      std::cout << "sweep " << param << " = " << format_double(values[i]) << "\n";
      double fl = NAN, gap = NAN;
      const int code = guarded([&] {
        const RunResult r = run_scenario(cfgs[i]);
        write_run(r, out / name);
        fl = r.report.at("first_law_max_defect").value;
        gap = r.report.at("sigma_weak_max_gap").value;
        if (!r.diagnostic.empty()) {
          std::cerr << name << ": " << r.diagnostic << "\n";
          return static_cast<int>(kNumerical);
        }
        return static_cast<int>(kOk);
      });
      worst = std::max(worst, code);
      vals.push_back(values[i]);
      codes.push_back(code);
      first_law.push_back(fl);
      weak_gap.push_back(gap);
    }
    std::filesystem::create_directories(out);
    write_csv(out / "sweep.csv", {param, "exit_code", "first_law_max_defect", "sigma_weak_max_gap"},
              {vals, codes, first_law, weak_gap});
    return worst;
  });
}

}  // namespace minidiss::cli
