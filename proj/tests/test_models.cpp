#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "minidiss/tcl.hpp"
#include "oracles.hpp"

using namespace minidiss;

namespace {

Operator excitation_number(int m) {
  const Operator b = oracle::annihilation(m);
  Operator e1 = Operator::Zero(2, 2);
  e1(1, 1) = 1.0;
  return oracle::kron(e1, Operator::Identity(m, m)) + oracle::kron(Operator::Identity(2, 2), b.adjoint() * b);
}

}  // namespace

TEST_CASE("JC Hamiltonian conserves the excitation number") {
  JCParams p;
  p.m_trunc = 20;
  p.kT = 0.5;
  const TotalModel m = build_jaynes_cummings(p);
  const Operator h = m.total_hamiltonian(0.0);
  const Operator n = excitation_number(20);
  CHECK(max_abs(h * n - n * h) < 1e-12);
  CHECK(is_hermitian(h, 1e-12));
  CHECK_NOTHROW(m.validate({0.0, 1.0}));
}

TEST_CASE("JC Hamiltonian matches the loop construction") {
  JCParams p;
  p.m_trunc = 8;
  p.omega0 = 1.1;
  p.omega = 0.9;
  p.g = 0.2;
  p.kT = 0.2;
  const Operator b = oracle::annihilation(8);
  Operator sp = Operator::Zero(2, 2);
  sp(1, 0) = 1.0;
  const Operator i2 = Operator::Identity(2, 2), im = Operator::Identity(8, 8);
  const Operator expected = p.omega0 * oracle::kron(sp * sp.adjoint(), im) +
                            p.omega * oracle::kron(i2, b.adjoint() * b) +
                            p.g * (oracle::kron(sp, b) + oracle::kron(sp.adjoint(), b.adjoint()));
  CHECK(max_abs(build_jaynes_cummings(p).total_hamiltonian(0.0) - expected) < 1e-14);
}

TEST_CASE("environment starts thermal and commutes with H_E") {
  JCParams p;
  p.m_trunc = 30;
  p.kT = 0.8;
  const TotalModel m = build_jaynes_cummings(p);
  CHECK(max_abs(m.rho_e0 * m.h_e - m.h_e * m.rho_e0) < 1e-12);
  // geometric Boltzmann weights (1 - x) x^k with x = exp(-w / kT), up to the truncation
  const double x = std::exp(-p.omega / p.kT);
  for (int k = 0; k < 5; ++k)
    CHECK(m.rho_e0(k, k).real() == doctest::Approx((1.0 - x) * std::pow(x, k)).epsilon(1e-9));
}

TEST_CASE("thermal tail weight is geometric") {
  for (double kT : {0.5, 1.0, 2.0})
    for (int m : {5, 20, 60})
      CHECK(thermal_tail_weight(0.9, kT, m) ==
            doctest::Approx(oracle::thermal_tail(0.9, kT, m)).epsilon(1e-10));
}

TEST_CASE("model builders are deterministic") {
  JCParams p;
  p.m_trunc = 10;
  p.kT = 0.3;
  const TotalModel a = build_jaynes_cummings(p), b = build_jaynes_cummings(p);
  CHECK(max_abs(a.total_hamiltonian(0.3) - b.total_hamiltonian(0.3)) == 0.0);
  CHECK(max_abs(a.rho_e0 - b.rho_e0) == 0.0);
  DephasingParams d;
  d.m_trunc = 10;
  d.kT = 0.3;
  CHECK(max_abs(build_dephasing(d).total_hamiltonian(0.0) - build_dephasing(d).total_hamiltonian(0.0)) ==
        0.0);
}

TEST_CASE("model builders enforce the truncation preconditions") {
  JCParams p;
  p.m_trunc = 1;
  CHECK_THROWS_AS(build_jaynes_cummings(p), PreconditionError);
  p.m_trunc = 5;
  p.kT = 5.0;  // tail far above 1e-10
  CHECK_THROWS_AS(build_jaynes_cummings(p), PreconditionError);
  DephasingParams d;
  d.m_trunc = 1;
  CHECK_THROWS_AS(build_dephasing(d), PreconditionError);
}

TEST_CASE("JC initial state carries the requested entries") {
  JCParams p;
  p.rho11_0 = 0.3;
  p.rho10_0 = cplx(0.1, -0.2);
  const DensityMatrix r = jc_initial_state(p);
  CHECK(r.op()(1, 1).real() == doctest::Approx(0.3));
  CHECK(std::abs(r.op()(1, 0) - cplx(0.1, -0.2)) < 1e-15);
  p.rho10_0 = 0.9;
  CHECK_THROWS(jc_initial_state(p));
}

TEST_CASE("JC vacuum Rabi oscillation matches the closed form") {
  JCParams p;
  p.omega0 = 1.0;
  p.omega = 0.9;
  p.g = 0.1;
  p.kT = 0.02;
  p.m_trunc = 4;
  const TimeGrid grid = TimeGrid::uniform(40.0, 0.5);
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(p), grid);
  Operator excited = Operator::Zero(2, 2);
  excited(1, 1) = 1.0;
  const auto rhos = traj.evolve(excited);
  for (int m = 0; m < grid.size(); ++m)
    CHECK(std::abs(rhos[m](1, 1).real() - oracle::rabi_excited(1.0, 0.9, 0.1, grid.time(m))) < 1e-10);
}

TEST_CASE("dephasing coherence factor matches two-branch evolution") {
  DephasingParams p;
  for (double t : {0.0, 0.7, 2.0, 3.14, 5.5}) {
    const double numeric = oracle::dephasing_coherence(p.omega, p.g, p.kT, 40, t);
    CHECK(std::abs(dephasing_coherence_factor(p, t) - numeric) < 1e-10);
  }
}

TEST_CASE("dephasing rate is the log-derivative of the coherence factor") {
  DephasingParams p;
  p.g = 0.15;
  p.omega = 1.3;
  p.kT = 0.7;
  for (double t : {0.2, 1.0, 2.5, 4.0}) {
    CHECK(dephasing_rate(p, t) ==
          doctest::Approx(oracle::dephasing_rate(p.omega, p.g, p.kT, t)).epsilon(1e-12));
    const double h = 1e-5;
    const double fd = -0.5 *
                      (std::log(dephasing_coherence_factor(p, t + h)) -
                       std::log(dephasing_coherence_factor(p, t - h))) /
                      (2.0 * h);
    CHECK(std::abs(fd - dephasing_rate(p, t)) < 1e-8);
  }
}

TEST_CASE("dephasing model preserves populations") {
  DephasingParams p;
  p.m_trunc = 30;
  const MapTrajectory traj = propagate_total(build_dephasing(p), TimeGrid::uniform(5.0, 0.5));
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;
  rho(0, 1) = rho(1, 0) = 0.2;
  for (const auto& r : traj.evolve(rho)) CHECK(std::abs(r(1, 1).real() - 0.7) < 1e-12);
}

TEST_CASE("thermal qubit semigroup has the Gibbs state as fixed point") {
  ThermalQubitParams p;
  p.omega0 = 1.2;
  p.gamma0 = 0.3;
  p.gamma_z = 0.1;
  p.kT = 0.9;
  const SuperOperator l = thermal_qubit_generator(p);
  CHECK(is_htp(l, 1e-12));
  const Operator h = p.omega0 * sigma_plus() * sigma_minus();
  CHECK(max_abs(l.apply(gibbs_state(h, 1.0 / p.kT).op())) < 1e-13);
  const auto rates = qubit_channel_rates(minimal_split(l));
  const double n = oracle::bose(p.omega0, p.kT);
  CHECK(rates[0] == doctest::Approx(p.gamma0 * (n + 1.0)).epsilon(1e-10));
  CHECK(rates[1] == doctest::Approx(p.gamma0 * n).epsilon(1e-10));
  CHECK(rates[2] == doctest::Approx(p.gamma_z).epsilon(1e-10));
}

TEST_CASE("channel analysis reports mixing of the qubit channels") {
  GeneratorSplit s;
  s.dim = 2;
  s.k_eff = Operator::Zero(2, 2);
  const Operator l = (sigma_minus() + sigma_plus()) / std::sqrt(2.0);
  s.terms.push_back({1.0, l});
  CHECK(qubit_channel_mixing(s) == doctest::Approx(0.5));
  const auto r = qubit_channel_rates(s);
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(0.5));
  CHECK(std::abs(r[2]) < 1e-15);
  GeneratorSplit three;
  three.dim = 3;
  CHECK_THROWS_AS(qubit_channel_rates(three), DimensionError);
}
