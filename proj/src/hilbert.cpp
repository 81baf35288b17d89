#include "minidiss/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace minidiss {

double max_abs(const Operator& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_square(const Operator& a) { return a.rows() == a.cols(); }

bool is_hermitian(const Operator& a, double tol) {
  return is_square(a) && max_abs(a - a.adjoint()) <= tol;
}

bool is_traceless(const Operator& a, double tol) {
  return is_square(a) && std::abs(a.trace()) <= tol;
}

bool is_positive_semidefinite(const Operator& a, double tol) {
  if (!is_hermitian(a, tol)) return false;
  return hermitian_eigenvalues(a).minCoeff() >= -tol;
}

Operator hermitian_part(const Operator& a) { return 0.5 * (a + a.adjoint()); }

Operator identity(int n) { return Operator::Identity(n, n); }

Operator matrix_unit(int n, int i, int j) {
  Operator b = Operator::Zero(n, n);
  b(i, j) = 1.0;
  return b;
}

Operator sigma_plus() { return matrix_unit(2, 1, 0); }
Operator sigma_minus() { return matrix_unit(2, 0, 1); }

Operator sigma_x() {
  Operator s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

Operator sigma_y() {
  Operator s(2, 2);
  s << 0.0, -kI, kI, 0.0;
  return s;
}

Operator sigma_z() {
  Operator s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

Operator annihilation(int m) {
  Operator b = Operator::Zero(m, m);
  for (int n = 1; n < m; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

Operator tensor(const Operator& a, const Operator& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  Operator out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

Operator partial_trace_env(const Operator& rho, int dim_s, int dim_e) {
  if (dim_s < 1 || dim_e < 1 || rho.rows() != dim_s * dim_e ||
      rho.cols() != dim_s * dim_e) {
    throw DimensionError("partial_trace_env: operator of size " +
                         std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + " does not factor as " +
                         std::to_string(dim_s) + "*" + std::to_string(dim_e));
  }
  Operator out(dim_s, dim_s);
  for (int a = 0; a < dim_s; ++a)
    for (int b = 0; b < dim_s; ++b)
      out(a, b) = rho.block(a * dim_e, b * dim_e, dim_e, dim_e).trace();
  return out;
}

RealVector hermitian_eigenvalues(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(a),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double trace_norm(const Operator& a) {
  Eigen::JacobiSVD<Operator> svd(a);
  return svd.singularValues().sum();
}

namespace {

template <class F>
Operator spectral_apply(const Operator& herm, F&& f) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(herm));
  const Operator& v = es.eigenvectors();
  Vector fe(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < fe.size(); ++i) fe(i) = f(es.eigenvalues()(i));
  return v * fe.asDiagonal() * v.adjoint();
}

}  // namespace

Operator matrix_function(const Operator& a, SpectralFunction f,
                         double exponent) {
  if (!is_square(a)) throw DimensionError("matrix_function: non-square input");
  switch (f) {
    case SpectralFunction::exp: {
      if (is_hermitian(a)) {
        return spectral_apply(a, [](double x) { return cplx(std::exp(x)); });
      }
      if (max_abs(a + a.adjoint()) <= kStateTol) {
        // a = i h with h Hermitian
        const Operator h = -kI * a;
        return spectral_apply(h, [](double x) { return std::exp(kI * x); });
      }
      return a.exp();
    }
    case SpectralFunction::log: {
      if (!is_hermitian(a))
        throw PreconditionError("matrix_function(log): non-Hermitian input");
      return spectral_apply(
          a, [](double x) { return cplx(std::log(std::max(x, kLogCutoff))); });
    }
    case SpectralFunction::power: {
      if (!is_hermitian(a))
        throw PreconditionError("matrix_function(power): non-Hermitian input");
      return spectral_apply(a, [exponent](double x) {
        if (exponent < 0.0) x = std::max(x, kLogCutoff);
        if (x < 0.0 && exponent != std::floor(exponent))
          return std::pow(cplx(x), exponent);
        return cplx(std::pow(x, exponent));
      });
    }
  }
  throw PreconditionError("matrix_function: unknown spectral function");
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(const Operator& op, double tol) {
  if (!is_square(op)) throw DimensionError("DensityMatrix: non-square operator");
  if (!is_hermitian(op, tol))
    throw PreconditionError("DensityMatrix: operator is not Hermitian");
  op_ = hermitian_part(op);
  if (std::abs(op_.trace() - 1.0) > tol)
    throw PreconditionError("DensityMatrix: trace " +
                            std::to_string(op_.trace().real()) + " != 1");
  if (hermitian_eigenvalues(op_).minCoeff() < -tol)
    throw PreconditionError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  return DensityMatrix(identity(n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const Vector v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double l : hermitian_eigenvalues(rho.op()))
    if (l > kLogCutoff) s -= l * std::log(l);
  return s;
}

double relative_entropy(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("relative_entropy: dimensions differ");
  Eigen::SelfAdjointEigenSolver<Operator> es(b.op());
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  double null_weight = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) <= kLogCutoff * scale) {
      const Vector v = es.eigenvectors().col(i);
      null_weight += (v.adjoint() * a.op() * v)(0, 0).real();
    }
  }
  if (null_weight > 1e-8)
    throw PreconditionError("relative_entropy: support of first argument not "
                            "contained in support of second (weight " +
                            std::to_string(null_weight) + ")");
  const Operator diff = logm(a.op()) - logm(b.op());
  return (a.op() * diff).trace().real();
}

DensityMatrix gibbs_state(const Operator& h, double beta) {
  if (!is_hermitian(h)) throw PreconditionError("gibbs_state: non-Hermitian h");
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(h));
  const RealVector& e = es.eigenvalues();
  const double e0 = e.minCoeff();
  Vector w(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = std::exp(-beta * (e(i) - e0));
  w /= w.sum();
  const Operator& v = es.eigenvectors();
  return DensityMatrix(v * w.asDiagonal() * v.adjoint());
}

}  // namespace minidiss
