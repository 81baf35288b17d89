#pragma once

// Exact dynamical maps Phi_t of a microscopic model and the time-local
// generator L_t = dPhi_t/dt Phi_t^{-1}, plus divisibility and
// distinguishability witnesses.

#include <cstdint>
#include <vector>

#include "minidiss/decomposition.hpp"
#include "minidiss/models.hpp"

namespace minidiss {

/// Uniform grid t_m = m * dt, m = 0..steps.
struct TimeGrid {
  double dt = 0.0;
  int steps = 0;

  double time(int m) const { return m * dt; }
  int size() const { return steps + 1; }
  double t_max() const { return steps * dt; }

  /// steps = round(t_max / dt). Throws PreconditionError unless t_max, dt > 0.
  static TimeGrid uniform(double t_max, double dt);
};

struct MapTrajectory {
  TimeGrid grid;
  std::vector<SuperOperator> maps;
  std::vector<double> condition_numbers;
  /// Exact dPhi/dt, filled only when requested from propagate_total.
  std::vector<SuperOperator> derivatives;
  /// Largest weighted population found in the top environment levels.
  double max_leakage = 0.0;
  double thermal_tail = 0.0;

  /// Phi_t[rho0] along the grid.
  std::vector<Operator> evolve(const Operator& rho0) const;
};

struct PropagationOptions {
  bool exact_derivatives = false;
  /// thermal tail / top-level leakage above this raises NumericalError
  double truncation_tol = 1e-8;
  int leakage_levels = 2;
};

/// Propagates every system matrix unit B_ij (x) rho_E(0) with midpoint
/// exponential steps exp(-i H(t + dt/2) dt) and partial-traces the result.
/// For time-independent models the step is exact for any dt.
MapTrajectory propagate_total(const TotalModel& model, const TimeGrid& grid,
                              const PropagationOptions& opts = {});

/// Phi_t = exp(t L) for a constant generator.
MapTrajectory semigroup_trajectory(const SuperOperator& generator, const TimeGrid& grid);

/// Every `stride`-th sample (maps, condition numbers, exact derivatives);
/// steps must be divisible by stride.
MapTrajectory subsample(const MapTrajectory& traj, int stride);

/// max_t of the spectral norm of Phi^a_t - Phi^b_t; both trajectories must
/// share a time grid.
double max_map_difference(const MapTrajectory& a, const MapTrajectory& b);

// ---------------------------------------------------------------------------

struct GeneratorTrajectory {
  TimeGrid grid;
  std::vector<SuperOperator> generators;
  std::vector<GeneratorSplit> splits;
  /// false at samples excluded as (near-)singular
  std::vector<bool> valid;
  std::vector<int> singular_indices;
  double max_htp_defect = 0.0;

  bool all_valid() const { return singular_indices.empty(); }
};

enum class DerivativeMode {
  /// central differences inside, four-point one-sided stencils at the ends
  finite_difference,
  /// uses MapTrajectory::derivatives (test oracle)
  exact,
};

struct ExtractionOptions {
  DerivativeMode derivative = DerivativeMode::finite_difference;
  double condition_threshold = 1e8;
  double htp_tol = 1e-8;
};

/// L_t by explicit LU solve against Phi_t (no pseudoinverse). Samples whose
/// condition number exceeds the threshold are marked invalid and get a zero
/// generator and an empty split.
GeneratorTrajectory generator_from_maps(const MapTrajectory& traj,
                                        const ExtractionOptions& opts = {});

/// Wraps known generators, attaching minimal splits.
GeneratorTrajectory generator_trajectory(const TimeGrid& grid,
                                         std::vector<SuperOperator> generators);

// ---------------------------------------------------------------------------
// witnesses

/// For m = 0..steps-1, the smallest eigenvalue of V[|psi><psi|] with
/// V = Phi_{m+1} Phi_m^{-1}, minimized over `samples` Haar-random pure states
/// and a fixed probe set (basis states and their pairwise superpositions).
/// Negative values witness a failure of P-divisibility; the converse does not
/// hold. The last entry and singular samples are NaN.
std::vector<double> p_divisibility_witness(const MapTrajectory& traj, int samples,
                                           std::uint64_t seed,
                                           double condition_threshold = 1e8);

struct TraceDistanceFlow {
  std::vector<double> distance;
  std::vector<double> derivative;
};

/// D(t) = 1/2 |Phi_t[rho1 - rho2]|_1 and its finite-difference derivative;
/// positive derivative marks information backflow.
TraceDistanceFlow trace_distance_flow(const MapTrajectory& traj, const DensityMatrix& rho1,
                                      const DensityMatrix& rho2);

// ---------------------------------------------------------------------------
// finite differences on a uniform grid (second order, one-sided at the ends)

template <class T>
std::vector<T> differentiate(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<T> d(n);
  if (n < 3) throw DimensionError("differentiate: need at least three samples");
  d[0] = (f[1] * 4.0 - f[0] * 3.0 - f[2]) * (1.0 / (2.0 * dt));
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * (1.0 / (2.0 * dt));
  d[n - 1] = (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * (1.0 / (2.0 * dt));
  return d;
}

/// Cumulative trapezoid, starting at 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt);

}  // namespace minidiss
