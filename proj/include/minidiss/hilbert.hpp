#pragma once

// Dense complex operator algebra on finite-dimensional Hilbert spaces.
//
// Units: hbar = k_B = 1. Bipartite spaces order the system factor first and
// the environment factor second, i.e. index (s, e) -> s * dim_e + e.

#include <complex>
#include <Eigen/Dense>

#include "minidiss/errors.hpp"

namespace minidiss {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Default absolute tolerance for Hermiticity / trace / positivity checks.
inline constexpr double kStateTol = 1e-10;
/// Eigenvalues below this are clamped before taking logarithms.
inline constexpr double kLogCutoff = 1e-14;

// ---------------------------------------------------------------------------
// predicates

/// Largest absolute entry of a matrix.
double max_abs(const Operator& a);

bool is_square(const Operator& a);
bool is_hermitian(const Operator& a, double tol = kStateTol);
bool is_traceless(const Operator& a, double tol = kStateTol);
bool is_positive_semidefinite(const Operator& a, double tol = kStateTol);

/// (A + A^dagger) / 2
Operator hermitian_part(const Operator& a);

// ---------------------------------------------------------------------------
// common operators

Operator identity(int n);
/// Matrix unit |i><j| in dimension n.
Operator matrix_unit(int n, int i, int j);

/// Qubit operators in the basis {|0>, |1>} with |0> the ground state.
/// sigma_plus = |1><0|, sigma_minus = |0><1|, sigma_z = diag(1, -1).
Operator sigma_plus();
Operator sigma_minus();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();

/// Truncated bosonic annihilation operator on levels 0..m-1.
Operator annihilation(int m);

// ---------------------------------------------------------------------------
// bipartite operations

/// Kronecker product a (x) b, first factor outermost.
Operator tensor(const Operator& a, const Operator& b);

/// Tr_E over the second factor of a (dim_s * dim_e)-dimensional operator.
Operator partial_trace_env(const Operator& rho, int dim_s, int dim_e);

// ---------------------------------------------------------------------------
// spectral functions

enum class SpectralFunction { exp, log, power };

/// Applies f to the eigenvalues of a.
///
/// `exp` accepts Hermitian and anti-Hermitian input through the spectral
/// route and falls back to Pade scaling-and-squaring for general matrices.
/// `log` and `power` require Hermitian input; eigenvalues below kLogCutoff
/// are clamped for `log` (and for negative exponents of `power`).
Operator matrix_function(const Operator& a, SpectralFunction f,
                         double exponent = 1.0);

inline Operator expm(const Operator& a) {
  return matrix_function(a, SpectralFunction::exp);
}
inline Operator logm(const Operator& a) {
  return matrix_function(a, SpectralFunction::log);
}

/// Eigenvalues (ascending) of the Hermitian part of a.
RealVector hermitian_eigenvalues(const Operator& a);

/// Sum of singular values.
double trace_norm(const Operator& a);

// ---------------------------------------------------------------------------
// states

/// A density matrix: Hermitian, unit trace, positive semidefinite (all within
/// kStateTol). Construction validates and symmetrizes.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Operator& op, double tol = kStateTol);

  const Operator& op() const { return op_; }
  int dim() const { return static_cast<int>(op_.rows()); }

  static DensityMatrix maximally_mixed(int n);
  static DensityMatrix pure(const Vector& psi);

 private:
  Operator op_;
};

/// S(rho) = -sum lambda ln lambda in nats, eigenvalues below kLogCutoff ignored.
double von_neumann_entropy(const DensityMatrix& rho);

/// S(a || b) = Tr{a (ln a - ln b)} with the clamped-log convention.
/// Throws PreconditionError when Tr{a P_null(b)} > 1e-8.
double relative_entropy(const DensityMatrix& a, const DensityMatrix& b);

/// exp(-beta h) / Tr exp(-beta h). beta = 0 gives the maximally mixed state.
DensityMatrix gibbs_state(const Operator& h, double beta);

}  // namespace minidiss
