#include "minidiss/superop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minidiss {

Vector vec(const Operator& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Operator unvec(const Vector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n)
    throw DimensionError("unvec: vector length is not n^2");
  return Eigen::Map<const Operator>(v.data(), n, n);
}

namespace {

int root_dim(Eigen::Index n2) {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
  if (static_cast<Eigen::Index>(n) * n != n2)
    throw DimensionError("superoperator size " + std::to_string(n2) +
                         " is not a perfect square");
  return n;
}

}  // namespace

SuperOperator::SuperOperator(Operator liouville) : mat_(std::move(liouville)) {
  if (!is_square(mat_)) throw DimensionError("SuperOperator: non-square matrix");
  dim_ = root_dim(mat_.rows());
}

SuperOperator SuperOperator::zero(int n) {
  return SuperOperator(Operator::Zero(n * n, n * n));
}

SuperOperator SuperOperator::identity(int n) {
  return SuperOperator(Operator::Identity(n * n, n * n));
}

SuperOperator SuperOperator::sandwich(const Operator& a, const Operator& b) {
  return SuperOperator(minidiss::tensor(b.transpose(), a));
}

SuperOperator SuperOperator::commutator(const Operator& h) {
  const Operator id = minidiss::identity(static_cast<int>(h.rows()));
  return SuperOperator(-kI * (minidiss::tensor(id, h) - minidiss::tensor(h.transpose(), id)));
}

SuperOperator SuperOperator::lindblad_dissipator(const Operator& l) {
  const int n = static_cast<int>(l.rows());
  const Operator id = minidiss::identity(n);
  const Operator ldl = l.adjoint() * l;
  return SuperOperator(minidiss::tensor(l.conjugate(), l) -
                       0.5 * minidiss::tensor(id, ldl) -
                       0.5 * minidiss::tensor(ldl.transpose(), id));
}

Operator SuperOperator::apply(const Operator& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    throw DimensionError("SuperOperator::apply: operand dimension mismatch");
  return unvec(mat_ * vec(x), dim_);
}

bool SuperOperator::is_hermiticity_preserving(double tol) const {
  return is_hermitian(choi_of(*this), tol);
}

double SuperOperator::trace_defect() const {
  // Tr X = <vec(I), vec(X)>, so the trace row is vec(I)^dag * mat.
  const Vector id = vec(minidiss::identity(dim_));
  return (id.adjoint() * mat_).cwiseAbs().maxCoeff();
}

bool SuperOperator::is_trace_annihilating(double tol) const {
  return trace_defect() <= tol;
}

bool SuperOperator::is_trace_preserving(double tol) const {
  const Vector id = vec(minidiss::identity(dim_));
  return ((id.adjoint() * mat_) - id.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

SuperOperator SuperOperator::operator+(const SuperOperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("SuperOperator +: dimension mismatch");
  return SuperOperator(mat_ + o.mat_);
}

SuperOperator SuperOperator::operator-(const SuperOperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("SuperOperator -: dimension mismatch");
  return SuperOperator(mat_ - o.mat_);
}

SuperOperator SuperOperator::operator*(const SuperOperator& o) const {
  if (o.dim_ != dim_) throw DimensionError("SuperOperator *: dimension mismatch");
  return SuperOperator(mat_ * o.mat_);
}

SuperOperator SuperOperator::operator*(double s) const {
  return SuperOperator(mat_ * s);
}

double max_abs(const SuperOperator& s) { return max_abs(s.matrix()); }

// ---------------------------------------------------------------------------
// Choi <-> Liouville: C[(i*N + a), (j*N + b)] = M[(a + b*N), (i + j*N)]

Operator choi_of(const SuperOperator& s) {
  const int n = s.dim();
  const Operator& m = s.matrix();
  Operator c(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          c(i * n + a, j * n + b) = m(a + b * n, i + j * n);
  return c;
}

SuperOperator choi_to_liouville(const Operator& choi) {
  if (!is_square(choi)) throw DimensionError("choi_to_liouville: non-square matrix");
  const int n = root_dim(choi.rows());
  Operator m(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          m(a + b * n, i + j * n) = choi(i * n + a, j * n + b);
  return SuperOperator(std::move(m));
}

// ---------------------------------------------------------------------------

Operator PseudoKraus::trace_condition() const {
  const int n = dim();
  Operator acc = Operator::Zero(n, n);
  for (const auto& t : terms) acc += t.gamma * t.op.adjoint() * t.op;
  return acc;
}

SuperOperator liouville_from_pseudo_kraus(const PseudoKraus& pk, int dim) {
  if (pk.terms.empty()) {
    if (dim < 1) throw DimensionError("liouville_from_pseudo_kraus: no terms and no dimension");
    return SuperOperator::zero(dim);
  }
  const int n = pk.dim();
  if (dim > 0 && dim != n)
    throw DimensionError("liouville_from_pseudo_kraus: dimension mismatch");
  Operator m = Operator::Zero(n * n, n * n);
  for (const auto& t : pk.terms) {
    if (t.op.rows() != n || t.op.cols() != n)
      throw DimensionError("liouville_from_pseudo_kraus: operators differ in dimension");
    m += t.gamma * tensor(t.op.conjugate(), t.op);
  }
  return SuperOperator(std::move(m));
}

PseudoKraus pseudo_kraus_from_superop(const SuperOperator& s, double rel_cutoff) {
  const Operator c = choi_of(s);
  if (!is_hermitian(c, kStateTol))
    throw PreconditionError("pseudo_kraus_from_superop: Choi matrix is not Hermitian (defect " +
                            std::to_string(max_abs(c - c.adjoint())) + ")");
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(c));
  const RealVector& g = es.eigenvalues();
  const double radius = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rel_cutoff * radius;
  PseudoKraus pk;
  for (Eigen::Index k = g.size() - 1; k >= 0; --k) {
    if (std::abs(g(k)) > cut && radius > 0.0)
      pk.terms.push_back({g(k), unvec(es.eigenvectors().col(k), s.dim())});
  }
  return pk;
}

// ---------------------------------------------------------------------------

Operator ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Operator z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) z(i, j) = cplx(normal(rng), normal(rng));
  return z;
}

Operator haar_random_unitary(int n, Rng& rng) {
  if (n < 1) throw DimensionError("haar_random_unitary: n must be >= 1");
  const Operator z = ginibre(n, n, rng);
  Eigen::HouseholderQR<Operator> qr(z);
  Operator q = qr.householderQ();
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= ad > 0.0 ? d / ad : cplx(1.0);
  }
  return q;
}

Vector haar_random_state(int n, Rng& rng) {
  if (n < 1) throw DimensionError("haar_random_state: n must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
  return v / v.norm();
}

SuperOperator random_htp_generator(int n, Rng& rng, int channels) {
  if (n < 1) throw DimensionError("random_htp_generator: n must be >= 1");
  if (channels < 0) channels = n * n;
  std::normal_distribution<double> normal(0.0, 1.0);
  SuperOperator l = SuperOperator::commutator(hermitian_part(ginibre(n, n, rng)));
  for (int k = 0; k < channels; ++k) {
    const double gamma = normal(rng);
    l = l + SuperOperator::lindblad_dissipator(ginibre(n, n, rng)) * gamma;
  }
  return l;
}

// ---------------------------------------------------------------------------

namespace detail {

double htp_inner_product_closed_form(const PseudoKraus& a, const PseudoKraus& b,
                                     double moment_sign) {
  if (a.terms.empty() || b.terms.empty()) return 0.0;
  const int n = a.dim();
  if (b.dim() != n) throw DimensionError("htp_inner_product: dimension mismatch");
  double acc = 0.0;
  for (const auto& e : a.terms) {
    for (const auto& f : b.terms) {
      const Operator edf = e.op.adjoint() * f.op;
      const cplx t = edf.trace();
      // Tr{E^dag F F^dag E} = ||E^dag F||_HS^2
      acc += e.gamma * f.gamma * (std::norm(t) + moment_sign * edf.squaredNorm());
    }
  }
  return acc / (static_cast<double>(n) * n * (n + 1));
}

}  // namespace detail

namespace {

constexpr double kHtpTol = 1e-8;

void require_htp(const SuperOperator& s, const char* who) {
  if (!s.is_trace_annihilating(kHtpTol) || !s.is_hermiticity_preserving(kHtpTol))
    throw PreconditionError(std::string(who) + ": argument is not in htp(H)");
}

}  // namespace

double htp_inner_product(const SuperOperator& l1, const SuperOperator& l2) {
  if (l1.dim() != l2.dim()) throw DimensionError("htp_inner_product: dimension mismatch");
  require_htp(l1, "htp_inner_product");
  require_htp(l2, "htp_inner_product");
  // a zero cutoff keeps every Choi eigenvector; the closed form is exact
  return detail::htp_inner_product_closed_form(pseudo_kraus_from_superop(l1, 0.0),
                                               pseudo_kraus_from_superop(l2, 0.0), 1.0);
}

double htp_norm(const SuperOperator& l) {
  return std::sqrt(std::max(0.0, htp_inner_product(l, l)));
}

std::vector<Operator> hamiltonian_basis(int n) {
  if (n < 1) throw DimensionError("hamiltonian_basis: n must be >= 1");
  std::vector<Operator> basis;
  // generalized Gell-Mann matrices, Tr{l_a l_b} = 2 delta_ab
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Operator s = Operator::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      basis.push_back(s);
      Operator a = Operator::Zero(n, n);
      a(j, k) = -kI;
      a(k, j) = kI;
      basis.push_back(a);
    }
  }
  for (int l = 1; l < n; ++l) {
    Operator d = Operator::Zero(n, n);
    const double c = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) d(j, j) = c;
    d(l, l) = -l * c;
    basis.push_back(d);
  }
  const double scale = std::sqrt(n * (n + 1.0) / 4.0);
  for (auto& h : basis) h *= scale;
  return basis;
}

}  // namespace minidiss
