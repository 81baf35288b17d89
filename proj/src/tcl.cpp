#include "minidiss/tcl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace minidiss {

TimeGrid TimeGrid::uniform(double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0))
    throw PreconditionError("TimeGrid: t_max and dt must be positive");
  TimeGrid g;
  g.dt = dt;
  g.steps = static_cast<int>(std::lround(t_max / dt));
  if (g.steps < 1) throw PreconditionError("TimeGrid: dt larger than t_max");
  return g;
}

std::vector<Operator> MapTrajectory::evolve(const Operator& rho0) const {
  std::vector<Operator> out;
  out.reserve(maps.size());
  for (const auto& m : maps) out.push_back(m.apply(rho0));
  return out;
}

namespace {

double condition_number(const Operator& a) {
  Eigen::JacobiSVD<Operator> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// Reduced map from the propagated columns psi_{i,n} = U |i> (x) |e_n>, each
// weighted by sqrt(p_n). Rows of `y` are (i, a) = i * N + a, columns (n, e).
Operator reduced_block(const Operator& cols, int n_s, int n_e, int kept) {
  Operator y(n_s * n_s, n_e * kept);
  for (int i = 0; i < n_s; ++i)
    for (int k = 0; k < kept; ++k)
      for (int a = 0; a < n_s; ++a)
        y.row(i * n_s + a).segment(k * n_e, n_e) =
            cols.col(i * kept + k).segment(a * n_e, n_e).transpose();
  return y;
}

Operator liouville_from_blocks(const Operator& z, int n_s) {
  // z((i,a),(j,b)) = Phi[|i><j|](a, b) = M(a + b N, i + j N)
  Operator m(n_s * n_s, n_s * n_s);
  for (int i = 0; i < n_s; ++i)
    for (int j = 0; j < n_s; ++j)
      for (int a = 0; a < n_s; ++a)
        for (int b = 0; b < n_s; ++b) m(a + b * n_s, i + j * n_s) = z(i * n_s + a, j * n_s + b);
  return m;
}

}  // namespace

MapTrajectory propagate_total(const TotalModel& model, const TimeGrid& grid,
                              const PropagationOptions& opts) {
  model.validate({0.0, grid.t_max()});
  const int ns = model.dim_s;
  const int ne = model.dim_e;
  const int dim = ns * ne;

  MapTrajectory traj;
  traj.grid = grid;
  if (model.params.count("omega") && model.params.count("kT")) {
    traj.thermal_tail = thermal_tail_weight(model.params.at("omega"), model.params.at("kT"), ne);
    if (traj.thermal_tail > opts.truncation_tol)
      throw NumericalError(model.name + ": thermal tail weight " +
                           std::to_string(traj.thermal_tail) + " exceeds truncation tolerance");
  }

  // environment state in its eigenbasis, negligible weights dropped
  Eigen::SelfAdjointEigenSolver<Operator> env(hermitian_part(model.rho_e0));
  std::vector<double> weights;
  std::vector<Vector> env_states;
  const double pmax = env.eigenvalues().maxCoeff();
  for (Eigen::Index k = env.eigenvalues().size() - 1; k >= 0; --k) {
    const double pk = env.eigenvalues()(k);
    if (pk > 1e-18 * pmax) {
      weights.push_back(pk);
      env_states.push_back(env.eigenvectors().col(k));
    }
  }
  const int kept = static_cast<int>(weights.size());

  Operator cols = Operator::Zero(dim, ns * kept);
  for (int i = 0; i < ns; ++i) {
    Vector si = Vector::Zero(ns);
    si(i) = 1.0;
    for (int k = 0; k < kept; ++k)
      cols.col(i * kept + k) = std::sqrt(weights[k]) * tensor(si, env_states[k]).col(0);
  }

  const int top = std::min(opts.leakage_levels, ne);
  auto record = [&](double t) {
    const Operator y = reduced_block(cols, ns, ne, kept);
    const Operator z = y * y.adjoint();
    traj.maps.emplace_back(liouville_from_blocks(z, ns));
    traj.condition_numbers.push_back(condition_number(traj.maps.back().matrix()));
    if (opts.exact_derivatives) {
      const Operator hcols = -kI * (model.total_hamiltonian(t) * cols);
      const Operator yd = reduced_block(hcols, ns, ne, kept);
      const Operator zd = yd * y.adjoint() + y * yd.adjoint();
      traj.derivatives.emplace_back(liouville_from_blocks(zd, ns));
    }
    double leak = 0.0;
    for (int a = 0; a < ns; ++a)
      leak += cols.middleRows(a * ne + ne - top, top).squaredNorm();
    leak /= ns;
    traj.max_leakage = std::max(traj.max_leakage, leak);
    if (leak > opts.truncation_tol)
      throw NumericalError(model.name + ": population " + std::to_string(leak) +
                           " leaked into the top oscillator levels at t = " + std::to_string(t));
  };

  traj.maps.reserve(grid.size());
  record(0.0);
  Operator step;
  if (model.time_independent) step = expm(-kI * model.total_hamiltonian(0.0) * grid.dt);
  for (int m = 0; m < grid.steps; ++m) {
    if (!model.time_independent)
      step = expm(-kI * model.total_hamiltonian(grid.time(m) + 0.5 * grid.dt) * grid.dt);
    cols = step * cols;
    record(grid.time(m + 1));
  }
  return traj;
}

MapTrajectory semigroup_trajectory(const SuperOperator& generator, const TimeGrid& grid) {
  MapTrajectory traj;
  traj.grid = grid;
  const Operator step = expm(generator.matrix() * grid.dt);
  Operator phi = Operator::Identity(generator.matrix().rows(), generator.matrix().cols());
  for (int m = 0; m <= grid.steps; ++m) {
    if (m > 0) phi = step * phi;
    traj.maps.emplace_back(phi);
    traj.condition_numbers.push_back(condition_number(phi));
    traj.derivatives.emplace_back(generator.matrix() * phi);
  }
  return traj;
}

MapTrajectory subsample(const MapTrajectory& traj, int stride) {
  if (stride < 1 || traj.grid.steps % stride != 0)
    throw PreconditionError("subsample: stride must divide the number of steps");
  MapTrajectory out;
  out.grid = TimeGrid{traj.grid.dt * stride, traj.grid.steps / stride};
  out.max_leakage = traj.max_leakage;
  out.thermal_tail = traj.thermal_tail;
  for (int m = 0; m <= out.grid.steps; ++m) {
    out.maps.push_back(traj.maps[m * stride]);
    out.condition_numbers.push_back(traj.condition_numbers[m * stride]);
    if (!traj.derivatives.empty()) out.derivatives.push_back(traj.derivatives[m * stride]);
  }
  return out;
}

double max_map_difference(const MapTrajectory& a, const MapTrajectory& b) {
  if (a.maps.size() != b.maps.size())
    throw DimensionError("max_map_difference: trajectories have different grids");
  double worst = 0.0;
  for (std::size_t m = 0; m < a.maps.size(); ++m) {
    Eigen::JacobiSVD<Operator> svd(a.maps[m].matrix() - b.maps[m].matrix());
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Operator> map_derivatives(const MapTrajectory& traj, DerivativeMode mode) {
  const std::size_t n = traj.maps.size();
  std::vector<Operator> d(n);
  if (mode == DerivativeMode::exact) {
    if (traj.derivatives.size() != n)
      throw PreconditionError("generator_from_maps: trajectory carries no exact derivatives");
    for (std::size_t i = 0; i < n; ++i) d[i] = traj.derivatives[i].matrix();
    return d;
  }
  if (n < 4) throw PreconditionError("generator_from_maps: need at least four time samples");
  const double h = traj.grid.dt;
  auto f = [&](std::size_t i) -> const Operator& { return traj.maps[i].matrix(); };
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f(i + 1) - f(i - 1)) / (2.0 * h);
  d[0] = (-11.0 * f(0) + 18.0 * f(1) - 9.0 * f(2) + 2.0 * f(3)) / (6.0 * h);
  d[n - 1] = (11.0 * f(n - 1) - 18.0 * f(n - 2) + 9.0 * f(n - 3) - 2.0 * f(n - 4)) / (6.0 * h);
  return d;
}

}  // namespace

GeneratorTrajectory generator_from_maps(const MapTrajectory& traj, const ExtractionOptions& opts) {
  const std::vector<Operator> dphi = map_derivatives(traj, opts.derivative);
  const int ns = traj.maps.front().dim();
  std::vector<SuperOperator> gens;
  std::vector<bool> valid;
  gens.reserve(dphi.size());
  for (std::size_t m = 0; m < dphi.size(); ++m) {
    if (!(traj.condition_numbers[m] <= opts.condition_threshold)) {
      gens.push_back(SuperOperator::zero(ns));
      valid.push_back(false);
      continue;
    }
    // L Phi = dPhi  <=>  Phi^T L^T = dPhi^T
    const Operator lt = traj.maps[m].matrix().transpose().fullPivLu().solve(dphi[m].transpose());
    gens.emplace_back(Operator(lt.transpose()));
    valid.push_back(true);
  }

  GeneratorTrajectory out;
  out.grid = traj.grid;
  out.valid = valid;
  for (std::size_t m = 0; m < gens.size(); ++m) {
    if (!valid[m]) {
      out.singular_indices.push_back(static_cast<int>(m));
      GeneratorSplit empty;
      empty.dim = ns;
      empty.k_eff = Operator::Zero(ns, ns);
      out.splits.push_back(std::move(empty));
      continue;
    }
    const SuperOperator& l = gens[m];
    const Operator c = choi_of(l);
    const double defect = std::max(l.trace_defect(), max_abs(c - c.adjoint()));
    out.max_htp_defect = std::max(out.max_htp_defect, defect);
    if (defect > opts.htp_tol)
      throw NumericalError("generator_from_maps: generator leaves htp(H) by " +
                           std::to_string(defect) + " at t = " +
                           std::to_string(traj.grid.time(static_cast<int>(m))));
    out.splits.push_back(minimal_split(l, opts.htp_tol));
  }
  out.generators = std::move(gens);
  return out;
}

GeneratorTrajectory generator_trajectory(const TimeGrid& grid,
                                         std::vector<SuperOperator> generators) {
  if (static_cast<int>(generators.size()) != grid.size())
    throw DimensionError("generator_trajectory: generator count does not match grid");
  GeneratorTrajectory out;
  out.grid = grid;
  for (const auto& l : generators) {
    const Operator c = choi_of(l);
    out.max_htp_defect =
        std::max(out.max_htp_defect, std::max(l.trace_defect(), max_abs(c - c.adjoint())));
    out.splits.push_back(minimal_split(l));
    out.valid.push_back(true);
  }
  out.generators = std::move(generators);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vector> probe_states(int n) {
  std::vector<Vector> probes;
  for (int i = 0; i < n; ++i) probes.push_back(Vector::Unit(n, i));
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (cplx phase : {cplx(1.0), cplx(-1.0), kI, -kI}) {
        Vector v = Vector::Zero(n);
        v(i) = r;
        v(j) = r * phase;
        probes.push_back(v);
      }
    }
  }
  return probes;
}

}  // namespace

std::vector<double> p_divisibility_witness(const MapTrajectory& traj, int samples,
                                           std::uint64_t seed, double condition_threshold) {
  const std::size_t n = traj.maps.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(n, nan);
  if (n == 0) return out;
  const int dim = traj.maps.front().dim();
  std::vector<Vector> states = probe_states(dim);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) states.push_back(haar_random_state(dim, rng));
  std::vector<Vector> vecs;
  vecs.reserve(states.size());
  for (const auto& psi : states) vecs.push_back(vec(psi * psi.adjoint()));

  for (std::size_t m = 0; m + 1 < n; ++m) {
    if (!(traj.condition_numbers[m] <= condition_threshold)) continue;
    // V Phi_m = Phi_{m+1}
    const Operator v = traj.maps[m]
                           .matrix()
                           .transpose()
                           .fullPivLu()
                           .solve(traj.maps[m + 1].matrix().transpose())
                           .transpose();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& x : vecs) {
      const Operator out_state = unvec(v * x, dim);
      worst = std::min(worst, hermitian_eigenvalues(out_state).minCoeff());
    }
    out[m] = worst;
  }
  return out;
}

TraceDistanceFlow trace_distance_flow(const MapTrajectory& traj, const DensityMatrix& rho1,
                                      const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("trace_distance_flow: dimension mismatch");
  TraceDistanceFlow flow;
  const Operator diff = rho1.op() - rho2.op();
  for (const auto& m : traj.maps) flow.distance.push_back(0.5 * trace_norm(m.apply(diff)));
  flow.derivative = differentiate(flow.distance, traj.grid.dt);
  return flow;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
  return out;
}

}  // namespace minidiss
