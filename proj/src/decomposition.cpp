#include "minidiss/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace minidiss {

SuperOperator GeneratorSplit::hamiltonian_part() const {
  return SuperOperator::commutator(k_eff);
}

SuperOperator GeneratorSplit::dissipator() const {
  Operator m = Operator::Zero(dim * dim, dim * dim);
  for (const auto& t : terms) m += t.rate * SuperOperator::lindblad_dissipator(t.op).matrix();
  return SuperOperator(std::move(m));
}

Operator GeneratorSplit::kossakowski() const {
  Operator a = Operator::Zero(dim * dim, dim * dim);
  for (const auto& t : terms) {
    const Vector v = vec(t.op);
    a += t.rate * v * v.adjoint();
  }
  return a;
}

namespace {

void fix_phase(Operator& l) {
  const double big = max_abs(l);
  if (big == 0.0) return;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      const cplx z = l(i, j);
      if (std::abs(z) > 1e-8 * big) {
        l *= std::conj(z) / std::abs(z);
        return;
      }
    }
  }
}

}  // namespace

GeneratorSplit minimal_split(const SuperOperator& l, double htp_tol, double rel_cutoff) {
  const int n = l.dim();
  if (!l.is_trace_annihilating(htp_tol))
    throw PreconditionError("minimal_split: generator is not trace annihilating (defect " +
                            std::to_string(l.trace_defect()) + ")");
  const Operator choi = choi_of(l);
  if (!is_hermitian(choi, htp_tol))
    throw PreconditionError("minimal_split: generator is not Hermiticity preserving");

  const PseudoKraus pk = pseudo_kraus_from_superop(l, 0.0);
  const double radius = hermitian_eigenvalues(choi).cwiseAbs().maxCoeff();

  GeneratorSplit split;
  split.dim = n;
  split.k_eff = Operator::Zero(n, n);
  const Operator id = identity(n);
  Operator kossakowski = Operator::Zero(n * n, n * n);
  for (const auto& t : pk.terms) {
    const cplx tr = t.op.trace();
    split.k_eff += t.gamma * (tr * t.op.adjoint() - std::conj(tr) * t.op);
    const Vector lv = vec(t.op - (tr / static_cast<double>(n)) * id);
    kossakowski += t.gamma * lv * lv.adjoint();
  }
  split.k_eff *= -kI / (2.0 * n);
  split.k_eff = hermitian_part(split.k_eff);
  split.k_eff -= (split.k_eff.trace() / static_cast<double>(n)) * id;

  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(kossakowski));
  const double cut = rel_cutoff * radius;
  for (Eigen::Index m = es.eigenvalues().size() - 1; m >= 0; --m) {
    const double rate = es.eigenvalues()(m);
    if (!(std::abs(rate) > cut) || radius == 0.0) continue;
    Operator op = unvec(es.eigenvectors().col(m), n);
    op -= (op.trace() / static_cast<double>(n)) * id;
    const double nrm = op.norm();
    if (nrm == 0.0) continue;
    op /= nrm;
    fix_phase(op);
    split.terms.push_back({rate * nrm * nrm, std::move(op)});
  }
  std::stable_sort(split.terms.begin(), split.terms.end(),
                   [](const LindbladTerm& a, const LindbladTerm& b) { return a.rate > b.rate; });

  const double residual = max_abs(split.reassemble() - l);
  const double scale = std::max(1.0, max_abs(l));
  if (residual > 1e-9 * scale)
    throw NumericalError("minimal_split: reassembly residual " + std::to_string(residual) +
                         " exceeds tolerance; generator is numerically defective");
  return split;
}

Operator projected_hamiltonian(const SuperOperator& l) {
  const int n = l.dim();
  Operator k = Operator::Zero(n, n);
  for (const auto& h : hamiltonian_basis(n))
    k += h * htp_inner_product(SuperOperator::commutator(h), l);
  return k;
}

double orthogonality_residual(const GeneratorSplit& split) {
  const SuperOperator d = split.dissipator();
  double worst = 0.0;
  for (const auto& h : hamiltonian_basis(split.dim))
    worst = std::max(worst, std::abs(htp_inner_product(d, SuperOperator::commutator(h))));
  return worst;
}

Operator dissipator_action(const GeneratorSplit& split, const Operator& rho) {
  if (rho.rows() != split.dim || rho.cols() != split.dim)
    throw DimensionError("dissipator_action: state dimension does not match split");
  Operator out = Operator::Zero(split.dim, split.dim);
  for (const auto& t : split.terms) {
    const Operator& l = t.op;
    const Operator ldl = l.adjoint() * l;
    out += t.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

// ---------------------------------------------------------------------------

Operator GaugeParams::j_matrix() const {
  Operator j = Operator::Zero(p + q, p + q);
  for (int i = 0; i < p; ++i) j(i, i) = 1.0;
  for (int i = p; i < p + q; ++i) j(i, i) = -1.0;
  return j;
}

double GaugeParams::indefinite_unitarity_defect() const {
  if (upsilon.rows() != p + q || upsilon.cols() != p + q)
    return std::numeric_limits<double>::infinity();
  const Operator j = j_matrix();
  return max_abs(upsilon.adjoint() * j * upsilon - j);
}

GaugeParams GaugeParams::identity(int p, int q) {
  return shift(Vector::Zero(p + q), p, q);
}

GaugeParams GaugeParams::shift(const Vector& alphas, int p, int q) {
  if (alphas.size() != p + q) throw DimensionError("GaugeParams::shift: alpha length != p + q");
  GaugeParams g;
  g.alphas = alphas;
  g.upsilon = Operator::Identity(p + q, p + q);
  g.p = p;
  g.q = q;
  return g;
}

std::pair<int, int> rate_signature(const GeneratorSplit& split) {
  int p = 0, q = 0;
  for (const auto& t : split.terms) {
    if (t.rate > 0.0) ++p;
    else if (t.rate < 0.0) ++q;
  }
  return {p, q};
}

GeneratorSplit partitioned(const GeneratorSplit& split) {
  GeneratorSplit out{split.dim, split.k_eff, {}};
  for (const auto& t : split.terms)
    if (t.rate > 0.0) out.terms.push_back(t);
  for (const auto& t : split.terms)
    if (t.rate < 0.0) out.terms.push_back(t);
  return out;
}

GeneratorSplit gauge_transform(const GeneratorSplit& split, const GaugeParams& g) {
  const GeneratorSplit part = partitioned(split);
  const auto [p, q] = rate_signature(part);
  if (p != g.p || q != g.q)
    throw PreconditionError("gauge_transform: signature (" + std::to_string(g.p) + "," +
                            std::to_string(g.q) + ") does not match split (" +
                            std::to_string(p) + "," + std::to_string(q) + ")");
  if (g.alphas.size() != p + q) throw DimensionError("gauge_transform: alpha length != p + q");
  if (g.indefinite_unitarity_defect() > 1e-10)
    throw PreconditionError("gauge_transform: Upsilon is not in U(p, q)");

  const int n = split.dim;
  const int m = p + q;
  const Operator id = identity(n);
  std::vector<Operator> absorbed(m);
  for (int i = 0; i < m; ++i) absorbed[i] = std::sqrt(std::abs(part.terms[i].rate)) * part.terms[i].op;

  GeneratorSplit out{n, part.k_eff, {}};
  for (int i = 0; i < m; ++i) {
    Operator mixed = Operator::Zero(n, n);
    for (int j = 0; j < m; ++j) mixed += g.upsilon(i, j) * absorbed[j];
    const double sign = i < p ? 1.0 : -1.0;
    const cplx a = g.alphas(i);
    out.k_eff += (sign / (2.0 * kI)) * (std::conj(a) * mixed - a * mixed.adjoint());
    Operator shifted = mixed + a * id;
    const double nrm = shifted.norm();
    if (nrm == 0.0) continue;
    out.terms.push_back({sign * nrm * nrm, shifted / nrm});
  }
  out.k_eff += g.beta_shift * id;
  out.k_eff = hermitian_part(out.k_eff);
  return out;
}

GaugeParams compose(const GaugeParams& second, const GaugeParams& first) {
  if (second.p != first.p || second.q != first.q)
    throw PreconditionError("compose: signatures differ");
  GaugeParams g;
  g.p = first.p;
  g.q = first.q;
  const Vector moved = second.upsilon * first.alphas;
  g.alphas = second.alphas + moved;
  g.upsilon = second.upsilon * first.upsilon;
  const Operator j = first.j_matrix();
  const cplx form = (second.alphas.adjoint() * j * moved)(0, 0);
  g.beta_shift = second.beta_shift + first.beta_shift + form.imag();
  return g;
}

Operator random_indefinite_unitary(int p, int q, double scale, Rng& rng) {
  const int m = p + q;
  std::normal_distribution<double> normal(0.0, 1.0);
  Operator a(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = scale * cplx(normal(rng), normal(rng));
  a = (0.5 * (a - a.adjoint())).eval();
  return expm(GaugeParams::identity(p, q).j_matrix() * a);
}

GaugeParams random_gauge(int p, int q, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector alphas(p + q);
  for (int i = 0; i < p + q; ++i) alphas(i) = scale * cplx(normal(rng), normal(rng));
  GaugeParams g = GaugeParams::shift(alphas, p, q);
  g.upsilon = random_indefinite_unitary(p, q, scale, rng);
  g.beta_shift = scale * normal(rng);
  return g;
}

// ---------------------------------------------------------------------------

MinimalityReport verify_minimality(const GeneratorSplit& split, int trials, std::uint64_t seed) {
  MinimalityReport report;
  report.trials = trials;
  const GeneratorSplit part = partitioned(split);
  const auto [p, q] = rate_signature(part);
  const double base_sq = htp_inner_product(part.dissipator(), part.dissipator());
  report.base_norm = std::sqrt(std::max(0.0, base_sq));
  const int n = split.dim;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-3.0, 0.5);
  bool first = true;
  for (int t = 0; t < trials; ++t) {
    Vector alphas(p + q);
    const double s = std::pow(10.0, log_scale(rng));
    for (int i = 0; i < p + q; ++i) alphas(i) = s * cplx(normal(rng), normal(rng));
    const GeneratorSplit moved = gauge_transform(part, GaugeParams::shift(alphas, p, q));
    const SuperOperator d = moved.dissipator();
    const double moved_sq = htp_inner_product(d, d);
    const double margin = std::sqrt(std::max(0.0, moved_sq)) - report.base_norm;
    report.margins.push_back(margin);
    if (first) {
      report.min_margin = report.max_margin = margin;
      first = false;
    }
    report.min_margin = std::min(report.min_margin, margin);
    report.max_margin = std::max(report.max_margin, margin);
    if (margin < -1e-10) ++report.violations;

    Operator dk = moved.k_eff - part.k_eff;
    dk -= (dk.trace() / static_cast<double>(n)) * identity(n);
    const double dk_sq = 2.0 * dk.squaredNorm() / (n * (n + 1.0));
    report.max_pythagoras_defect =
        std::max(report.max_pythagoras_defect, std::abs(moved_sq - base_sq - dk_sq));
    if (alphas.norm() > 1e-6 && dk.norm() > 1e-6 && !(margin > 0.0)) ++report.strict_failures;
  }
  return report;
}

}  // namespace minidiss
