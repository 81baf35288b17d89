#include "minidiss/models.hpp"

#include <cmath>
#include <string>

namespace minidiss {

Operator TotalModel::total_hamiltonian(double t) const {
  return tensor(h_s(t), identity(dim_e)) + tensor(identity(dim_s), h_e) + h_i(t);
}

void TotalModel::validate(const std::vector<double>& sample_times) const {
  for (double t : sample_times) {
    const Operator h = total_hamiltonian(t);
    if (h.rows() != dim_s * dim_e)
      throw DimensionError(name + ": total Hamiltonian has the wrong dimension");
    if (!is_hermitian(h, 1e-10))
      throw PreconditionError(name + ": H(t) is not Hermitian at t = " + std::to_string(t));
  }
  DensityMatrix check(rho_e0);
  if (max_abs(rho_e0 * h_e - h_e * rho_e0) > 1e-10)
    throw PreconditionError(name + ": initial environment state does not commute with H_E");
}

DensityMatrix thermal_state(const Operator& h, double kT) {
  if (kT < 0.0) throw PreconditionError("thermal_state: negative temperature");
  if (kT > 0.0) return gibbs_state(h, 1.0 / kT);
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(h));
  return DensityMatrix::pure(es.eigenvectors().col(0));
}

double thermal_tail_weight(double omega, double kT, int m) {
  if (kT <= 0.0) return 0.0;
  return std::exp(-omega * m / kT);
}

namespace {

void check_truncation(const std::string& who, double omega, double kT, int m) {
  if (m < 2) throw PreconditionError(who + ": truncation must keep at least 2 levels");
  if (omega <= 0.0) throw PreconditionError(who + ": oscillator frequency must be positive");
  const double tail = thermal_tail_weight(omega, kT, m);
  if (tail >= 1e-10)
    throw PreconditionError(who + ": thermal tail weight " + std::to_string(tail) +
                            " beyond truncation exceeds 1e-10; increase m_trunc");
}

}  // namespace

TotalModel build_jaynes_cummings(const JCParams& p) {
  check_truncation("jaynes_cummings", p.omega, p.kT, p.m_trunc);
  const int m = p.m_trunc;
  const Operator b = annihilation(m);
  const Operator hs = p.omega0 * sigma_plus() * sigma_minus();
  const Operator hi = p.g * (tensor(sigma_plus(), b) + tensor(sigma_minus(), b.adjoint()));

  TotalModel model;
  model.name = "jaynes_cummings";
  model.dim_s = 2;
  model.dim_e = m;
  model.h_s = [hs](double) { return hs; };
  model.h_e = p.omega * b.adjoint() * b;
  model.h_i = [hi](double) { return hi; };
  model.rho_e0 = thermal_state(model.h_e, p.kT).op();
  model.time_independent = true;
  model.params = {{"omega0", p.omega0}, {"omega", p.omega}, {"g", p.g},
                  {"kT", p.kT},         {"m_trunc", m}};
  return model;
}

DensityMatrix jc_initial_state(const JCParams& p) {
  Operator rho(2, 2);
  rho << 1.0 - p.rho11_0, std::conj(p.rho10_0), p.rho10_0, p.rho11_0;
  return DensityMatrix(rho);
}

TotalModel build_dephasing(const DephasingParams& p) {
  check_truncation("dephasing", p.omega, p.kT, p.m_trunc);
  const int m = p.m_trunc;
  const Operator b = annihilation(m);
  const Operator hs = p.omega0 * sigma_plus() * sigma_minus();
  const Operator hi = p.g * tensor(sigma_z(), b + b.adjoint());

  TotalModel model;
  model.name = "dephasing";
  model.dim_s = 2;
  model.dim_e = m;
  model.h_s = [hs](double) { return hs; };
  model.h_e = p.omega * b.adjoint() * b;
  model.h_i = [hi](double) { return hi; };
  model.rho_e0 = thermal_state(model.h_e, p.kT).op();
  model.time_independent = true;
  model.params = {{"omega0", p.omega0}, {"omega", p.omega}, {"g", p.g},
                  {"kT", p.kT},         {"m_trunc", m}};
  return model;
}

namespace {

double coth_half(const DephasingParams& p) {
  if (p.kT <= 0.0) return 1.0;
  return 1.0 / std::tanh(p.omega / (2.0 * p.kT));
}

}  // namespace

double dephasing_coherence_factor(const DephasingParams& p, double t) {
  const double w = p.omega;
  return std::exp(-4.0 * p.g * p.g * (1.0 - std::cos(w * t)) * coth_half(p) / (w * w));
}

double dephasing_rate(const DephasingParams& p, double t) {
  return 2.0 * p.g * p.g * std::sin(p.omega * t) * coth_half(p) / p.omega;
}

SuperOperator thermal_qubit_generator(const ThermalQubitParams& p) {
  const double n = p.kT > 0.0 ? 1.0 / std::expm1(p.omega0 / p.kT) : 0.0;
  const Operator h = p.omega0 * sigma_plus() * sigma_minus();
  return SuperOperator::commutator(h) +
         SuperOperator::lindblad_dissipator(sigma_minus()) * (p.gamma0 * (n + 1.0)) +
         SuperOperator::lindblad_dissipator(sigma_plus()) * (p.gamma0 * n) +
         SuperOperator::lindblad_dissipator(sigma_z()) * p.gamma_z;
}

// ---------------------------------------------------------------------------

namespace {

std::array<Vector, 3> qubit_channel_basis() {
  return {vec(sigma_minus()), vec(sigma_plus()), vec(sigma_z()) / std::sqrt(2.0)};
}

void require_qubit(const GeneratorSplit& split) {
  if (split.dim != 2) throw DimensionError("qubit channel analysis requires a two-level system");
}

}  // namespace

std::array<double, 3> qubit_channel_rates(const GeneratorSplit& split) {
  require_qubit(split);
  const Operator a = split.kossakowski();
  const auto basis = qubit_channel_basis();
  std::array<double, 3> r{};
  for (int k = 0; k < 3; ++k) r[k] = (basis[k].adjoint() * a * basis[k])(0, 0).real();
  r[2] /= 2.0;  // D[sigma_z] has |sigma_z|_HS^2 = 2
  return r;
}

double qubit_channel_mixing(const GeneratorSplit& split) {
  require_qubit(split);
  const Operator a = split.kossakowski();
  const auto basis = qubit_channel_basis();
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) worst = std::max(worst, std::abs((basis[i].adjoint() * a * basis[j])(0, 0)));
  return worst;
}

JCStructureReport expected_jc_structure(const std::vector<GeneratorSplit>& splits,
                                        double omega0) {
  JCStructureReport report;
  const auto basis = qubit_channel_basis();
  Operator span(4, 3);
  for (int k = 0; k < 3; ++k) span.col(k) = basis[k];
  const Operator proj = span * span.adjoint();
  for (const auto& s : splits) {
    require_qubit(s);
    report.delta_omega.push_back((s.k_eff(1, 1) - s.k_eff(0, 0)).real() - omega0);
    report.max_k_offdiagonal = std::max(report.max_k_offdiagonal, std::abs(s.k_eff(0, 1)));
    report.max_channel_mixing = std::max(report.max_channel_mixing, qubit_channel_mixing(s));
    const Operator a = s.kossakowski();
    report.max_channel_leak = std::max(report.max_channel_leak, max_abs(a - proj * a * proj));
  }
  if (!report.delta_omega.empty()) report.delta_omega0 = report.delta_omega.front();
  return report;
}

}  // namespace minidiss
