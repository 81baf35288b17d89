#pragma once

// Minimal-dissipation splitting of time-local generators.
//
// A generator L in htp(H) is split as L = -i[K, .] + D with D orthogonal to
// every Hamiltonian map under the Haar-averaged scalar product. Equivalently
// the Lindblad operators of D are traceless. K is reported traceless.

#include <cstdint>
#include <vector>

#include "minidiss/superop.hpp"

namespace minidiss {

struct LindbladTerm {
  double rate;
  Operator op;
};

struct GeneratorSplit {
  int dim = 0;
  Operator k_eff;
  std::vector<LindbladTerm> terms;

  /// -i[K, .]
  SuperOperator hamiltonian_part() const;
  /// sum_k rate_k (L_k . L_k^dag - 1/2 {L_k^dag L_k, .})
  SuperOperator dissipator() const;
  SuperOperator reassemble() const { return hamiltonian_part() + dissipator(); }

  /// Kossakowski matrix sum_k rate_k vec(L_k) vec(L_k)^dag; basis independent.
  Operator kossakowski() const;
};

/// Relative cutoff (fraction of the Choi spectral radius) below which
/// channel rates are dropped.
inline constexpr double kRateRelativeCutoff = kChoiRelativeCutoff;

/// Unique split with traceless Lindblad operators.
///
/// The Lindblad operators are the Hilbert-Schmidt orthonormal eigen-operators
/// of the Kossakowski matrix (rates are its eigenvalues), sorted by rate in
/// descending order, each phase-fixed so its first significant entry in a
/// row-major scan is real positive. Throws PreconditionError when `l` is not
/// htp within `htp_tol` and NumericalError when the reassembly residual
/// exceeds 1e-9 relative to max(1, |L|_max).
GeneratorSplit minimal_split(const SuperOperator& l, double htp_tol = 1e-9,
                             double rel_cutoff = kRateRelativeCutoff);

/// K from the orthogonal projection sum_j H_j <-i[H_j, .], L> (Lemma-1 basis).
/// Independent of minimal_split's closed form; used to cross-check it.
Operator projected_hamiltonian(const SuperOperator& l);

/// max_j |<D, -i[H_j, .]>| over the orthonormal Hamiltonian basis.
double orthogonality_residual(const GeneratorSplit& split);

/// D[rho] of the split.
Operator dissipator_action(const GeneratorSplit& split, const Operator& rho);
inline Operator dissipator_action(const GeneratorSplit& split, const DensityMatrix& rho) {
  return dissipator_action(split, rho.op());
}

// ---------------------------------------------------------------------------
// gauge freedom

/// Parameters (alpha, Upsilon, beta) of the invariance group. Upsilon acts on
/// the rate-absorbed Lindblad vector ordered positive rates first, and must
/// satisfy Upsilon^dag J Upsilon = J with J = diag(I_p, -I_q).
struct GaugeParams {
  Vector alphas;
  double beta_shift = 0.0;
  Operator upsilon;
  int p = 0;
  int q = 0;

  Operator j_matrix() const;
  double indefinite_unitarity_defect() const;

  static GaugeParams identity(int p, int q);
  static GaugeParams shift(const Vector& alphas, int p, int q);
};

/// Number of positive and negative rates (p, q) of a split.
std::pair<int, int> rate_signature(const GeneratorSplit& split);

/// Split reordered with positive rates first (stable within each sign).
GeneratorSplit partitioned(const GeneratorSplit& split);

/// L -> Upsilon L + alpha,
/// K -> K + (1/2i)[(alpha^*, Upsilon L) - (alpha, Upsilon^* L^dag)] + beta,
/// with (v, w) = v . J w and the rates absorbed into L. The output terms are
/// normalized back to unit Hilbert-Schmidt norm with rate sign(J) |L'|^2.
/// Throws PreconditionError on signature mismatch or when Upsilon is not in
/// U(p, q) within 1e-10.
GeneratorSplit gauge_transform(const GeneratorSplit& split, const GaugeParams& g);

/// Group product: `second` applied after `first`.
GaugeParams compose(const GaugeParams& second, const GaugeParams& first);

/// exp(J A) with A a random anti-Hermitian matrix of entry scale `scale`.
Operator random_indefinite_unitary(int p, int q, double scale, Rng& rng);
GaugeParams random_gauge(int p, int q, double scale, Rng& rng);

// ---------------------------------------------------------------------------

struct MinimalityReport {
  int trials = 0;
  /// norm after < norm before - 1e-10
  int violations = 0;
  /// shifts that move K (|dK|_HS > 1e-6) but did not increase the norm
  int strict_failures = 0;
  double base_norm = 0.0;
  double min_margin = 0.0;
  double max_margin = 0.0;
  /// largest | |D'|^2 - |D|^2 - |-i[dK, .]|^2 |
  double max_pythagoras_defect = 0.0;
  std::vector<double> margins;
};

/// Applies `trials` random complex shifts alpha and compares dissipator norms.
MinimalityReport verify_minimality(const GeneratorSplit& split, int trials,
                                   std::uint64_t seed);

}  // namespace minidiss
