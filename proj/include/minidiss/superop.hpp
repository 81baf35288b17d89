#pragma once

// Superoperators on B(H), dim H = N.
//
// Vectorization is column stacking throughout: vec(X)[a + b*N] = X(a, b), so
// vec(A X B) = (B^T (x) A) vec(X). A SuperOperator stores the N^2 x N^2
// Liouville matrix acting on vec(X).
//
// The Choi matrix is C = sum_ij |i><j| (x) S(|i><j|) (input slot first), so a
// Choi eigenvector v unvectorizes (column stacking) to a pseudo-Kraus operator.

#include <cstdint>
#include <random>
#include <vector>

#include "minidiss/hilbert.hpp"

namespace minidiss {

Vector vec(const Operator& x);
Operator unvec(const Vector& v, int n);

class SuperOperator {
 public:
  SuperOperator() = default;
  explicit SuperOperator(Operator liouville);

  static SuperOperator zero(int n);
  static SuperOperator identity(int n);
  /// X -> A X B
  static SuperOperator sandwich(const Operator& a, const Operator& b);
  /// X -> -i[H, X]
  static SuperOperator commutator(const Operator& h);
  /// X -> L X L^dag - 1/2 {L^dag L, X}
  static SuperOperator lindblad_dissipator(const Operator& l);

  int dim() const { return dim_; }
  const Operator& matrix() const { return mat_; }

  Operator apply(const Operator& x) const;

  /// Choi matrix Hermitian within tol.
  bool is_hermiticity_preserving(double tol = kStateTol) const;
  /// Tr S[B_ij] = 0 for all matrix units (generator convention).
  bool is_trace_annihilating(double tol = kStateTol) const;
  /// Tr S[B_ij] = delta_ij (dynamical-map convention).
  bool is_trace_preserving(double tol = kStateTol) const;
  /// Largest |Tr S[B_ij]| (generator convention defect).
  double trace_defect() const;

  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator-(const SuperOperator& o) const;
  SuperOperator operator*(const SuperOperator& o) const;  // composition
  SuperOperator operator*(double s) const;

 private:
  int dim_ = 0;
  Operator mat_;
};

/// Hermitian elements of htp(H): Hermiticity preserving and trace annihilating.
inline bool is_htp(const SuperOperator& s, double tol = kStateTol) {
  return s.is_hermiticity_preserving(tol) && s.is_trace_annihilating(tol);
}

double max_abs(const SuperOperator& s);

// ---------------------------------------------------------------------------
// Choi matrix

Operator choi_of(const SuperOperator& s);
SuperOperator choi_to_liouville(const Operator& choi);

// ---------------------------------------------------------------------------
// pseudo-Kraus form  S[X] = sum_k gamma_k E_k X E_k^dag

struct PseudoKrausTerm {
  double gamma;
  Operator op;
};

struct PseudoKraus {
  std::vector<PseudoKrausTerm> terms;

  int dim() const {
    return terms.empty() ? 0 : static_cast<int>(terms.front().op.rows());
  }
  /// sum_k gamma_k E_k^dag E_k; vanishes for trace-annihilating maps.
  Operator trace_condition() const;
};

/// Liouville matrix sum_k gamma_k conj(E_k) (x) E_k. Throws DimensionError
/// for empty or mismatched terms unless `dim` is supplied for the empty case.
SuperOperator liouville_from_pseudo_kraus(const PseudoKraus& pk, int dim = 0);

/// Default relative cutoff on Choi eigenvalues (fraction of spectral radius).
inline constexpr double kChoiRelativeCutoff = 1e-11;

/// Hermitian eigendecomposition of the Choi matrix. Terms with
/// |gamma| <= rel_cutoff * max|gamma| are dropped; the retained E_k are
/// Hilbert-Schmidt orthonormal. Throws PreconditionError if the Choi matrix is
/// not Hermitian within kStateTol.
PseudoKraus pseudo_kraus_from_superop(const SuperOperator& s,
                                      double rel_cutoff = kChoiRelativeCutoff);

// ---------------------------------------------------------------------------
// Haar sampling

using Rng = std::mt19937_64;

/// QR of a complex Ginibre matrix with the phases of diag(R) removed.
Operator haar_random_unitary(int n, Rng& rng);
/// Matrix of i.i.d. standard complex Gaussian entries (real and imaginary parts
/// each N(0, 1)).
Operator ginibre(int rows, int cols, Rng& rng);

/// Uniformly distributed unit vector (first column of a Haar unitary in law).
Vector haar_random_state(int n, Rng& rng);

/// -i[H, .] + sum_k g_k D[E_k] with H, E_k Ginibre-derived (E_k not traceless)
/// and g_k ~ N(0, 1) of either sign; channels < 0 means n^2 channels.
SuperOperator random_htp_generator(int n, Rng& rng, int channels = -1);

// ---------------------------------------------------------------------------
// Haar-averaged scalar product on htp(H)
//
//   <L1, L2> = avg_psi avg_phi <psi| L1[P_phi] L2[P_phi] |psi>
//            = 1/(N^2 (N+1)) sum_kl g_k m_l ( |Tr E_k^dag F_l|^2
//                                          + Tr E_k^dag F_l F_l^dag E_k )
//
// with L1 = sum g_k E_k . E_k^dag and L2 = sum m_l F_l . F_l^dag.

/// Throws DimensionError on mismatched dimension and PreconditionError when
/// either argument is not in htp(H) within 1e-8.
double htp_inner_product(const SuperOperator& l1, const SuperOperator& l2);
double htp_norm(const SuperOperator& l);

namespace detail {
/// Closed form with the sign of the second-order Haar moment term selectable;
/// `moment_sign = -1` is the negative control used by the verification suite.
double htp_inner_product_closed_form(const PseudoKraus& a, const PseudoKraus& b,
                                     double moment_sign);
}  // namespace detail

/// Orthonormal basis {H_j} of traceless Hermitian operators with
/// Tr{H_i H_j} = N(N+1)/2 delta_ij, so that the maps -i[H_j, .] are
/// orthonormal under htp_inner_product. Generalized Gell-Mann ordering.
std::vector<Operator> hamiltonian_basis(int n);

}  // namespace minidiss
