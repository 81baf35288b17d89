#include "minidiss/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minidiss {

double internal_energy(const Operator& k_eff, const Operator& rho) {
  if (k_eff.rows() != rho.rows() || k_eff.cols() != rho.cols())
    throw DimensionError("internal_energy: dimension mismatch");
  const cplx u = (k_eff * rho).trace();
  if (std::abs(u.imag()) > 1e-9)
    throw NumericalError("internal_energy: Tr{K rho} has imaginary part " +
                         std::to_string(u.imag()) + "; K is not Hermitian");
  return u.real();
}

namespace {

void require_aligned(const GeneratorTrajectory& traj, const std::vector<Operator>& rhos) {
  if (static_cast<int>(rhos.size()) != traj.grid.size() ||
      traj.splits.size() != rhos.size())
    throw DimensionError("thermodynamics: state series and generator trajectory are misaligned");
  if (!traj.all_valid())
    throw NumericalError("thermodynamics: generator trajectory has singular samples (first at t = " +
                         std::to_string(traj.grid.time(traj.singular_indices.front())) + ")");
}

std::vector<Operator> k_series(const GeneratorTrajectory& traj) {
  std::vector<Operator> k;
  k.reserve(traj.splits.size());
  for (const auto& s : traj.splits) k.push_back(s.k_eff);
  return k;
}

double spohn_rate(const Operator& d_rho, const Operator& rho, const Operator& log_gibbs) {
  return -(d_rho * (logm(hermitian_part(rho)) - log_gibbs)).trace().real();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

WorkHeat work_and_heat(const GeneratorTrajectory& traj, const std::vector<Operator>& rhos) {
  require_aligned(traj, rhos);
  const double dt = traj.grid.dt;
  const std::vector<Operator> k = k_series(traj);
  const std::vector<Operator> k_dot = differentiate(k, dt);
  const std::vector<Operator> rho_dot = differentiate(rhos, dt);

  std::vector<double> power(rhos.size()), heat_flow(rhos.size()), heat_flow_state(rhos.size());
  for (std::size_t m = 0; m < rhos.size(); ++m) {
    power[m] = (k_dot[m] * rhos[m]).trace().real();
    heat_flow[m] = (k[m] * dissipator_action(traj.splits[m], rhos[m])).trace().real();
    heat_flow_state[m] = (k[m] * rho_dot[m]).trace().real();
  }
  return {cumulative_trapezoid(power, dt), cumulative_trapezoid(heat_flow, dt),
          cumulative_trapezoid(heat_flow_state, dt)};
}

EntropyProduction entropy_production(const GeneratorTrajectory& traj,
                                     const std::vector<Operator>& rhos, double beta) {
  require_aligned(traj, rhos);
  const double dt = traj.grid.dt;
  const std::size_t n = rhos.size();
  const WorkHeat wq = work_and_heat(traj, rhos);

  EntropyProduction out;
  std::vector<Operator> log_gibbs(n);
  std::vector<double> rel(n);
  const double s0 = von_neumann_entropy(DensityMatrix(rhos.front()));
  for (std::size_t m = 0; m < n; ++m) {
    const DensityMatrix rho(rhos[m]);
    const DensityMatrix gibbs = gibbs_state(traj.splits[m].k_eff, beta);
    log_gibbs[m] = logm(gibbs.op());
    rel[m] = relative_entropy(rho, gibbs);
    out.ds.push_back(von_neumann_entropy(rho) - s0);
    out.sigma_total.push_back(out.ds.back() - beta * wq.q[m]);
    const Operator d_rho = dissipator_action(traj.splits[m], rhos[m]);
    out.sigma_rate.push_back(spohn_rate(d_rho, rhos[m], log_gibbs[m]));
  }
  const std::vector<Operator> log_gibbs_dot = differentiate(log_gibbs, dt);
  std::vector<double> drift(n);
  for (std::size_t m = 0; m < n; ++m) drift[m] = (rhos[m] * log_gibbs_dot[m]).trace().real();
  const std::vector<double> drift_int = cumulative_trapezoid(drift, dt);
  for (std::size_t m = 0; m < n; ++m)
    out.sigma_relative_entropy.push_back(rel.front() - rel[m] - drift_int[m]);
  return out;
}

std::vector<double> weak_coupling_rate(const GeneratorTrajectory& traj,
                                       const std::vector<Operator>& rhos, double beta,
                                       const Operator& h_s) {
  require_aligned(traj, rhos);
  const Operator log_gibbs = logm(gibbs_state(h_s, beta).op());
  std::vector<double> out;
  out.reserve(rhos.size());
  for (std::size_t m = 0; m < rhos.size(); ++m)
    out.push_back(spohn_rate(dissipator_action(traj.splits[m], rhos[m]), rhos[m], log_gibbs));
  return out;
}

std::vector<double> fixed_point_residual(const GeneratorTrajectory& traj, double beta) {
  std::vector<double> out;
  out.reserve(traj.splits.size());
  for (const auto& s : traj.splits) {
    const DensityMatrix gibbs = gibbs_state(s.k_eff, beta);
    out.push_back(max_abs(dissipator_action(s, gibbs.op())));
  }
  return out;
}

ThermoTrajectory thermodynamics(const GeneratorTrajectory& traj,
                                const std::vector<Operator>& rhos, double beta,
                                const Operator& h_s) {
  require_aligned(traj, rhos);
  ThermoTrajectory th;
  th.inverse_temperature = beta;
  for (int m = 0; m < traj.grid.size(); ++m) th.times.push_back(traj.grid.time(m));
  for (std::size_t m = 0; m < rhos.size(); ++m)
    th.u.push_back(internal_energy(traj.splits[m].k_eff, rhos[m]));
  WorkHeat wq = work_and_heat(traj, rhos);
  th.w = std::move(wq.w);
  th.q = std::move(wq.q);
  th.q_state_route = std::move(wq.q_state_route);
  EntropyProduction ep = entropy_production(traj, rhos, beta);
  th.ds = std::move(ep.ds);
  th.sigma = std::move(ep.sigma_total);
  th.sigma_rate = std::move(ep.sigma_rate);
  th.sigma_relative_entropy = std::move(ep.sigma_relative_entropy);
  th.sigma_weak = weak_coupling_rate(traj, rhos, beta, h_s);
  th.fixed_point_residual = fixed_point_residual(traj, beta);
  return th;
}

double ThermoTrajectory::first_law_defect() const {
  double worst = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m)
    worst = std::max(worst, std::abs(u[m] - u.front() - w[m] - q[m]));
  return worst;
}

double ThermoTrajectory::heat_route_defect() const { return max_abs_diff(q, q_state_route); }

double ThermoTrajectory::entropy_route_defect() const {
  return max_abs_diff(sigma, sigma_relative_entropy);
}

double ThermoTrajectory::entropy_rate_defect() const {
  if (sigma.size() < 3) return 0.0;
  const double dt = times[1] - times[0];
  const std::vector<double> d = differentiate(sigma, dt);
  double worst = 0.0;
  for (std::size_t m = 1; m + 1 < d.size(); ++m)
    worst = std::max(worst, std::abs(d[m] - sigma_rate[m]));
  return worst;
}

SecondLawReport second_law_check(const ThermoTrajectory& thermo,
                                 const std::vector<double>& witness, const SecondLawGate& gate) {
  SecondLawReport r;
  bool first = true;
  for (std::size_t m = 0; m < thermo.sigma_rate.size(); ++m) {
    const double s = thermo.sigma_rate[m];
    const bool fixed_point = thermo.fixed_point_residual[m] < gate.residual_gate;
    if (s < -gate.event_threshold) ++r.negative_rate_events;
    // both intermediate maps touching t_m must be positive
    double w = NAN;
    for (std::size_t k : {m - 1, m})
      if (k < witness.size() && !std::isnan(witness[k])) w = std::isnan(w) ? witness[k] : std::min(w, witness[k]);
    if (std::isnan(w)) continue;
    const bool markovian = w >= -gate.witness_tol;
    if (fixed_point && s < -gate.event_threshold) {
      ++r.gated_events;
      if (markovian) ++r.counterexamples;
    }
    if (fixed_point && markovian) {
      ++r.checked;
      if (s < -gate.sigma_tol) ++r.violations;
      r.min_gated_sigma = first ? s : std::min(r.min_gated_sigma, s);
      first = false;
    }
  }
  return r;
}

}  // namespace minidiss
