#pragma once

// Microscopic system + environment models feeding the TCL extraction.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "minidiss/decomposition.hpp"

namespace minidiss {

/// H(t) = H_S(t) (x) I + I (x) H_E + H_I(t) on the (system, environment)
/// product space, with the environment initially in rho_e0.
struct TotalModel {
  std::string name;
  int dim_s = 0;
  int dim_e = 0;
  std::function<Operator(double)> h_s;
  Operator h_e;
  std::function<Operator(double)> h_i;
  Operator rho_e0;
  bool time_independent = true;
  std::map<std::string, double> params;

  Operator total_hamiltonian(double t) const;
  /// Throws PreconditionError unless H(t) is Hermitian at the given times and
  /// rho_e0 is a state commuting with H_E (1e-10).
  void validate(const std::vector<double>& sample_times = {0.0}) const;
};

/// Thermal state of h at temperature kT (ground-state projector for kT = 0).
DensityMatrix thermal_state(const Operator& h, double kT);

/// Weight of an untruncated thermal oscillator beyond its first m levels.
double thermal_tail_weight(double omega, double kT, int m);

struct JCParams {
  double omega0 = 1.0;
  double omega = 0.9;
  double g = 0.1;
  double kT = 1.0;
  int m_trunc = 60;
  double rho11_0 = 0.25;
  cplx rho10_0 = 0.0;
};

/// H_S = omega0 sigma_+ sigma_-, H_E = omega b^dag b, H_I = g(sigma_+ b + sigma_- b^dag).
/// Throws PreconditionError when m_trunc < 2 or the thermal tail exceeds 1e-10.
TotalModel build_jaynes_cummings(const JCParams& p);

/// rho_S(0) with rho_11 = rho11_0 (excited) and rho_10 = rho10_0.
DensityMatrix jc_initial_state(const JCParams& p);

struct DephasingParams {
  double omega0 = 1.0;
  double omega = 1.0;
  double g = 0.1;
  double kT = 1.0;
  int m_trunc = 60;
};

/// H_S = omega0 sigma_+ sigma_-, H_E = omega b^dag b, H_I = sigma_z (x) g(b + b^dag).
TotalModel build_dephasing(const DephasingParams& p);

/// Exact coherence factor |kappa(t)| of the untruncated single-mode model,
/// exp(-4 g^2 (1 - cos w t) coth(w / 2kT) / w^2).
double dephasing_coherence_factor(const DephasingParams& p, double t);

/// -1/2 d/dt ln|kappa(t)|, the rate of the channel D[sigma_z].
double dephasing_rate(const DephasingParams& p, double t);

/// Detailed-balance qubit semigroup: H = omega0 sigma_+ sigma_-, rates
/// gamma0 (n+1) on sigma_-, gamma0 n on sigma_+, gamma_z on sigma_z, with n
/// the Bose occupation at kT.
struct ThermalQubitParams {
  double omega0 = 1.0;
  double gamma0 = 0.05;
  double gamma_z = 0.0;
  double kT = 1.0;
};
SuperOperator thermal_qubit_generator(const ThermalQubitParams& p);

// ---------------------------------------------------------------------------
// qubit channel structure

/// Rates in the fixed channel basis: D = r[0] D[sigma_-] + r[1] D[sigma_+]
/// + r[2] D[sigma_z] (diagonal of the Kossakowski matrix).
std::array<double, 3> qubit_channel_rates(const GeneratorSplit& split);

/// Largest off-diagonal Kossakowski entry in the orthonormal basis
/// {sigma_-, sigma_+, sigma_z / sqrt 2}.
double qubit_channel_mixing(const GeneratorSplit& split);

struct JCStructureReport {
  std::vector<double> delta_omega;
  /// max_t |K_01|
  double max_k_offdiagonal = 0.0;
  /// max_t qubit_channel_mixing
  double max_channel_mixing = 0.0;
  /// Kossakowski weight outside span{sigma_+, sigma_-, sigma_z}
  double max_channel_leak = 0.0;
  double delta_omega0 = 0.0;
  bool ok(double tol = 1e-8, double delta0_tol = 1e-6) const {
    return max_k_offdiagonal < tol && max_channel_mixing < tol && max_channel_leak < tol &&
           std::abs(delta_omega0) < delta0_tol;
  }
};

/// Checks K_S(t) = [omega0 + dw(t)] sigma_+ sigma_- + const and the channel
/// structure; dw(t) = K_11 - K_00 - omega0.
JCStructureReport expected_jc_structure(const std::vector<GeneratorSplit>& splits,
                                        double omega0);

}  // namespace minidiss
