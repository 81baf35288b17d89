#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "minidiss/tcl.hpp"
#include "oracles.hpp"

using namespace minidiss;

namespace {

JCParams small_jc() {
  JCParams p;
  p.m_trunc = 12;
  p.kT = 0.4;
  p.g = 0.2;
  return p;
}

Operator probe_state() {
  Operator rho(2, 2);
  rho << 0.6, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.4;
  return rho;
}

}  // namespace

TEST_CASE("time grid construction") {
  const TimeGrid g = TimeGrid::uniform(1.0, 0.1);
  CHECK(g.steps == 10);
  CHECK(g.size() == 11);
  CHECK(g.t_max() == doctest::Approx(1.0));
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0.0), PreconditionError);
}

TEST_CASE("finite differences and trapezoid are exact on low-order polynomials") {
  std::vector<double> f, lin;
  const double dt = 0.1;
  for (int i = 0; i < 20; ++i) {
    const double t = i * dt;
    f.push_back(3.0 * t * t - t + 2.0);
    lin.push_back(2.0 * t + 1.0);
  }
  const auto d = differentiate(f, dt);
  for (int i = 0; i < 20; ++i) CHECK(d[i] == doctest::Approx(6.0 * i * dt - 1.0).epsilon(1e-12));
  const auto c = cumulative_trapezoid(lin, dt);
  for (int i = 0; i < 20; ++i) {
    const double t = i * dt;
    CHECK(c[i] == doctest::Approx(t * t + t).epsilon(1e-12));
  }
  CHECK_THROWS_AS(differentiate(std::vector<double>{1.0, 2.0}, dt), DimensionError);
}

TEST_CASE("maps start at the identity and stay CPT") {
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(20.0, 0.2));
  CHECK(max_abs(traj.maps.front() - SuperOperator::identity(2)) < 1e-12);
  for (const auto& m : traj.maps) {
    CHECK(m.is_trace_preserving(1e-9));
    CHECK(hermitian_eigenvalues(choi_of(m)).minCoeff() >= -1e-8);
  }
  CHECK(traj.thermal_tail < 1e-10);
}

TEST_CASE("generator of a semigroup is recovered to second order") {
  ThermalQubitParams p;
  p.gamma0 = 0.2;
  p.gamma_z = 0.05;
  const SuperOperator l = thermal_qubit_generator(p);
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const GeneratorTrajectory gen = generator_from_maps(semigroup_trajectory(l, TimeGrid::uniform(2.0, dt)));
    double worst = 0.0;
    for (std::size_t m = 1; m + 1 < gen.generators.size(); ++m)
      worst = std::max(worst, max_abs(gen.generators[m] - l));
    if (prev > 0.0) CHECK(prev / worst == doctest::Approx(4.0).epsilon(0.05));
    prev = worst;
    CHECK(gen.all_valid());
  }
}

TEST_CASE("exact-derivative generator integrates back to the maps with RK4") {
  // generators on the half grid provide the RK4 midpoints; the window ends
  // before the first near-singular map, where the generator turns stiff
  const double dt = 0.1;
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()),
                                             TimeGrid::uniform(6.0, dt / 2.0), {.exact_derivatives = true});
  const GeneratorTrajectory gen = generator_from_maps(traj, {.derivative = DerivativeMode::exact});
  CHECK(gen.max_htp_defect < 1e-8);
  const auto exact = traj.evolve(probe_state());
  Operator rho = probe_state();
  double worst = 0.0;
  for (std::size_t m = 0; m + 2 < gen.generators.size(); m += 2) {
    const auto& l0 = gen.generators[m];
    const auto& lh = gen.generators[m + 1];
    const auto& l1 = gen.generators[m + 2];
    const Operator k1 = l0.apply(rho);
    const Operator k2 = lh.apply(rho + 0.5 * dt * k1);
    const Operator k3 = lh.apply(rho + 0.5 * dt * k2);
    const Operator k4 = l1.apply(rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    worst = std::max(worst, max_abs(rho - exact[m + 2]));
  }
  CHECK(worst < 100.0 * std::pow(dt, 4));
}

TEST_CASE("finite-difference generator reproduces the state derivative") {
  const double dt = 0.02;
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(10.0, dt),
                                             {.exact_derivatives = true});
  const GeneratorTrajectory gen = generator_from_maps(traj);
  const auto rhos = traj.evolve(probe_state());
  double worst = 0.0;
  for (std::size_t m = 0; m < rhos.size(); ++m) {
    const Operator exact = traj.derivatives[m].apply(probe_state());
    worst = std::max(worst, max_abs(gen.generators[m].apply(rhos[m]) - exact));
  }
  CHECK(worst < 10.0 * dt * dt);
  for (const auto& l : gen.generators) CHECK(is_htp(l, 1e-8));
}

TEST_CASE("subsampling keeps every stride-th sample") {
  const MapTrajectory traj = semigroup_trajectory(thermal_qubit_generator({}), TimeGrid::uniform(1.0, 0.05));
  const MapTrajectory sub = subsample(traj, 4);
  CHECK(sub.grid.steps == 5);
  CHECK(sub.grid.dt == doctest::Approx(0.2));
  CHECK(max_abs(sub.maps[3] - traj.maps[12]) == 0.0);
  CHECK(sub.derivatives.size() == sub.maps.size());
  CHECK_THROWS_AS(subsample(traj, 3), PreconditionError);
  CHECK(max_map_difference(sub, sub) == 0.0);
  CHECK_THROWS_AS(max_map_difference(sub, traj), DimensionError);
}

TEST_CASE("samples above the condition threshold are marked singular") {
  MapTrajectory traj = semigroup_trajectory(thermal_qubit_generator({}), TimeGrid::uniform(1.0, 0.1));
  traj.condition_numbers[5] = 1e12;
  const GeneratorTrajectory gen = generator_from_maps(traj);
  CHECK_FALSE(gen.all_valid());
  REQUIRE(gen.singular_indices.size() == 1);
  CHECK(gen.singular_indices[0] == 5);
  CHECK_FALSE(gen.valid[5]);
  CHECK(max_abs(gen.generators[5]) == 0.0);
  const auto w = p_divisibility_witness(traj, 10, 1);
  CHECK(std::isnan(w[5]));
}

TEST_CASE("exact mode requires stored derivatives") {
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(1.0, 0.1));
  CHECK_THROWS_AS(generator_from_maps(traj, {.derivative = DerivativeMode::exact}), PreconditionError);
}

TEST_CASE("P-divisibility witness is nonnegative for a GKSL semigroup") {
  ThermalQubitParams p;
  p.gamma0 = 0.3;
  const MapTrajectory traj = semigroup_trajectory(thermal_qubit_generator(p), TimeGrid::uniform(5.0, 0.1));
  const auto w = p_divisibility_witness(traj, 50, 3);
  CHECK(std::isnan(w.back()));
  for (std::size_t m = 0; m + 1 < w.size(); ++m) CHECK(w[m] >= -1e-12);
  // contractive dynamics: the trace distance never grows
  const auto flow = trace_distance_flow(traj, DensityMatrix::pure(Vector::Unit(2, 0)),
                                        DensityMatrix::pure(Vector::Unit(2, 1)));
  for (std::size_t m = 1; m + 1 < flow.derivative.size(); ++m) CHECK(flow.derivative[m] <= 1e-12);
  CHECK(flow.distance.front() == doctest::Approx(1.0));
}

TEST_CASE("P-divisibility witness detects recoherence in pure dephasing") {
  // the dephasing rate 2 g^2 sin(w t) coth / w is negative on (pi / w, 2 pi / w)
  DephasingParams p;
  p.g = 0.3;
  p.m_trunc = 40;
  const TimeGrid grid = TimeGrid::uniform(6.0, 0.1);
  const MapTrajectory traj = propagate_total(build_dephasing(p), grid);
  const auto w = p_divisibility_witness(traj, 50, 4);
  for (int m = 0; m + 1 < grid.size(); ++m) {
    const double a = grid.time(m), b = grid.time(m + 1);
    if (b < M_PI - 1e-9) CHECK(w[m] >= -1e-9);
    if (a > M_PI + 1e-9) CHECK(w[m] < -1e-6);
  }
  // recoherence shows up as trace-distance backflow of |+>, |->
  Vector plus(2), minus(2);
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  const auto flow = trace_distance_flow(traj, DensityMatrix::pure(plus / std::sqrt(2.0)),
                                        DensityMatrix::pure(minus / std::sqrt(2.0)));
  CHECK(flow.derivative[45] > 0.0);
  CHECK(flow.derivative[15] < 0.0);
}

TEST_CASE("extracted dephasing generator has the closed-form rate") {
  DephasingParams p;
  p.m_trunc = 40;
  const double dt = 0.01;
  const GeneratorTrajectory gen =
      generator_from_maps(propagate_total(build_dephasing(p), TimeGrid::uniform(6.0, dt)));
  for (int m = 1; m + 1 < gen.grid.size(); m += 25) {
    const auto r = qubit_channel_rates(gen.splits[m]);
    CHECK(std::abs(r[2] - oracle::dephasing_rate(p.omega, p.g, p.kT, gen.grid.time(m))) < 10.0 * dt * dt);
    CHECK(std::abs(r[0]) < 1e-9);
    CHECK(std::abs(r[1]) < 1e-9);
  }
}

TEST_CASE("JC generator has a trace-annihilating pseudo-Kraus form") {
  const GeneratorTrajectory gen =
      generator_from_maps(propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(4.0, 0.02)));
  for (int m : {10, 77, 150}) {
    const SuperOperator& l = gen.generators[m];
    const PseudoKraus pk = pseudo_kraus_from_superop(l);
    CHECK(max_abs(liouville_from_pseudo_kraus(pk) - l) < 1e-9);
    CHECK(max_abs(pk.trace_condition()) < 1e-9);
  }
}

TEST_CASE("JC split reassembles the generator action on the evolved state") {
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(4.0, 0.02));
  const GeneratorTrajectory gen = generator_from_maps(traj);
  const auto rhos = traj.evolve(probe_state());
  for (int m : {5, 64, 190}) {
    const Operator& k = gen.splits[m].k_eff;
    const Operator expected = gen.generators[m].apply(rhos[m]) + kI * (k * rhos[m] - rhos[m] * k);
    CHECK(max_abs(dissipator_action(gen.splits[m], rhos[m]) - expected) < 1e-9);
  }
}

TEST_CASE("random shifts never lower the dissipator norm of a JC split") {
  const GeneratorTrajectory gen =
      generator_from_maps(propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(4.0, 0.02)));
  const MinimalityReport r = verify_minimality(gen.splits[120], 200, 77);
  CHECK(r.trials == 200);
  CHECK(r.violations == 0);
  CHECK(r.strict_failures == 0);
  CHECK(r.min_margin >= -1e-10);
}

TEST_CASE("negative JC witness intervals carry a negative rate") {
  // a CP-divisible interval has nonnegative rates, so a negative witness
  // must coincide with some negative channel rate at an end of the interval
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(30.0, 0.02));
  const GeneratorTrajectory gen = generator_from_maps(traj);
  const auto w = p_divisibility_witness(traj, 50, 8);
  int negative = 0;
  for (std::size_t m = 0; m + 1 < w.size(); ++m) {
    if (!(w[m] < -1e-6)) continue;
    ++negative;
    const auto a = qubit_channel_rates(gen.splits[m]);
    const auto b = qubit_channel_rates(gen.splits[m + 1]);
    const double lowest = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
    CHECK(lowest < 1e-6);
  }
  CHECK(negative > 0);
}

TEST_CASE("JC trace distance shows recurrences") {
  const MapTrajectory traj = propagate_total(build_jaynes_cummings(small_jc()), TimeGrid::uniform(60.0, 0.05));
  const auto flow = trace_distance_flow(traj, DensityMatrix::pure(Vector::Unit(2, 0)),
                                        DensityMatrix::pure(Vector::Unit(2, 1)));
  int backflow_episodes = 0;
  for (std::size_t m = 1; m < flow.derivative.size(); ++m)
    if (flow.derivative[m] > 1e-6 && flow.derivative[m - 1] <= 1e-6) ++backflow_episodes;
  CHECK(backflow_episodes >= 2);
  const double lowest = *std::min_element(flow.distance.begin(), flow.distance.end());
  CHECK(lowest < flow.distance.front());
  CHECK(flow.distance.back() > lowest);
}
