#pragma once

// Thermodynamic bookkeeping on a generator trajectory: internal energy from
// the effective Hamiltonian K_S(t), work and heat, entropy production and its
// rate, the weak-coupling (bare-Hamiltonian) rate, and fixed-point residuals.
//
// Integrals are cumulative trapezoids on the extraction grid; time
// derivatives of sampled series are second-order finite differences.

#include <vector>

#include "minidiss/tcl.hpp"

namespace minidiss {

/// Tr{K rho}. Throws NumericalError when the imaginary part exceeds 1e-9.
double internal_energy(const Operator& k_eff, const Operator& rho);
inline double internal_energy(const Operator& k_eff, const DensityMatrix& rho) {
  return internal_energy(k_eff, rho.op());
}

struct WorkHeat {
  std::vector<double> w;
  /// dissipator route: int Tr{K D[rho]}
  std::vector<double> q;
  /// state-derivative route: int Tr{K drho/dt}
  std::vector<double> q_state_route;
};

/// Throws DimensionError when the state series is not aligned with the grid
/// and NumericalError when the trajectory has singular samples.
WorkHeat work_and_heat(const GeneratorTrajectory& traj, const std::vector<Operator>& rhos);

struct EntropyProduction {
  std::vector<double> ds;
  /// Sigma = dS - beta Q
  std::vector<double> sigma_total;
  /// sigma = -Tr{D[rho](ln rho - ln rho_G)}
  std::vector<double> sigma_rate;
  /// relative-entropy form S(rho0||G0) - S(rho||G) - int Tr{rho d/dt ln G}
  std::vector<double> sigma_relative_entropy;
};

EntropyProduction entropy_production(const GeneratorTrajectory& traj,
                                     const std::vector<Operator>& rhos, double beta);

/// -Tr{D[rho](ln rho - ln rho_G^w)} with rho_G^w the Gibbs state of h_s.
std::vector<double> weak_coupling_rate(const GeneratorTrajectory& traj,
                                       const std::vector<Operator>& rhos, double beta,
                                       const Operator& h_s);

/// max-entry norm of D_t[rho_G(t)], rho_G(t) the Gibbs state of K_S(t).
std::vector<double> fixed_point_residual(const GeneratorTrajectory& traj, double beta);

struct ThermoTrajectory {
  std::vector<double> times;
  double inverse_temperature = 0.0;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> q;
  std::vector<double> q_state_route;
  std::vector<double> ds;
  std::vector<double> sigma;
  std::vector<double> sigma_rate;
  std::vector<double> sigma_relative_entropy;
  std::vector<double> sigma_weak;
  std::vector<double> fixed_point_residual;

  /// max_t |U(t) - U(0) - W(t) - Q(t)|
  double first_law_defect() const;
  /// max_t |Q(t) - Q_state_route(t)|
  double heat_route_defect() const;
  /// max_t |Sigma(t) - Sigma_relative_entropy(t)|
  double entropy_route_defect() const;
  /// max over interior t of |dSigma/dt - sigma|
  double entropy_rate_defect() const;
};

ThermoTrajectory thermodynamics(const GeneratorTrajectory& traj,
                                const std::vector<Operator>& rhos, double beta,
                                const Operator& h_s);

struct SecondLawReport {
  /// samples passing both gates
  int checked = 0;
  /// gated samples with sigma < -sigma_tol
  int violations = 0;
  /// samples with sigma < -event_threshold and residual below the gate
  int gated_events = 0;
  /// gated events without a negative P-divisibility witness
  int counterexamples = 0;
  /// samples with sigma < -event_threshold regardless of gates
  int negative_rate_events = 0;
  double min_gated_sigma = 0.0;
};

struct SecondLawGate {
  double residual_gate = 1e-6;
  double witness_tol = 1e-9;
  double sigma_tol = 1e-7;
  double event_threshold = 1e-6;
};

/// Conditional second law: sigma >= -sigma_tol wherever the Gibbs state is
/// an instantaneous fixed point (residual < gate) and the witness is
/// nonnegative (>= -witness_tol). `witness[m]` refers to the interval
/// [t_m, t_m+1]; sample m is gated on the smaller of witness[m - 1] and
/// witness[m], NaN entries ignored.
SecondLawReport second_law_check(const ThermoTrajectory& thermo,
                                 const std::vector<double>& witness,
                                 const SecondLawGate& gate = {});

}  // namespace minidiss
