#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "minidiss/decomposition.hpp"
#include "oracles.hpp"

using namespace minidiss;

namespace {

double scale_of(const SuperOperator& l) { return std::max(1.0, max_abs(l)); }

Vector random_alphas(int k, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector a(k);
  for (int i = 0; i < k; ++i) a(i) = scale * cplx(nd(rng), nd(rng));
  return a;
}

}  // namespace

TEST_CASE("minimal split reassembles with traceless operators") {
  Rng rng(31);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 30; ++k) {
      const SuperOperator l = random_htp_generator(n, rng);
      const GeneratorSplit s = minimal_split(l);
      CHECK(max_abs(s.reassemble() - l) / scale_of(l) < 1e-9);
      CHECK(std::abs(s.k_eff.trace()) < 1e-11);
      CHECK(is_hermitian(s.k_eff, 1e-12));
      for (const auto& t : s.terms) {
        CHECK(std::abs(t.op.trace()) < 1e-11);
        CHECK(std::abs(t.op.norm() - 1.0) < 1e-10);
      }
      for (std::size_t i = 1; i < s.terms.size(); ++i) CHECK(s.terms[i - 1].rate >= s.terms[i].rate);
    }
}

TEST_CASE("dissipator is orthogonal to every Hamiltonian map") {
  Rng rng(32);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 10; ++k) {
      const SuperOperator l = random_htp_generator(n, rng);
      const GeneratorSplit s = minimal_split(l);
      CHECK(orthogonality_residual(s) < 1e-9 * scale_of(l));
      // direct check against the library-independent basis condition
      for (const auto& h : hamiltonian_basis(n))
        CHECK(std::abs(htp_inner_product(s.dissipator(), SuperOperator::commutator(h))) <
              1e-9 * scale_of(l));
    }
}

TEST_CASE("K matches the projection onto the Hamiltonian basis") {
  Rng rng(33);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 10; ++k) {
      const SuperOperator l = random_htp_generator(n, rng);
      CHECK(max_abs(minimal_split(l).k_eff - projected_hamiltonian(l)) < 1e-9 * scale_of(l));
    }
}

TEST_CASE("K of a pure commutator is the traceless Hamiltonian") {
  Rng rng(34);
  const Operator h = oracle::random_hermitian(3, rng);
  const Operator h_tl = h - h.trace() / 3.0 * Operator::Identity(3, 3);
  const GeneratorSplit s = minimal_split(SuperOperator::commutator(h));
  CHECK(max_abs(s.k_eff - h_tl) < 1e-12);
  CHECK(s.terms.empty());
}

TEST_CASE("a Lindblad operator with a trace moves its identity part into K") {
  // D[A + c I] = D[A] - i[(c A^dag - c* A) / 2i, .]
  Rng rng(35);
  const int n = 3;
  const Operator l0 = oracle::gaussian(n, n, rng);
  const Operator l0_tl = l0 - l0.trace() / static_cast<double>(n) * Operator::Identity(n, n);
  const cplx c = l0.trace() / static_cast<double>(n);
  const Operator dk = (c * l0_tl.adjoint() - std::conj(c) * l0_tl) / (2.0 * kI);
  const GeneratorSplit s = minimal_split(SuperOperator::lindblad_dissipator(l0));
  CHECK(max_abs(s.k_eff - dk) < 1e-10);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].rate == doctest::Approx(l0_tl.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("projection is idempotent") {
  Rng rng(36);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 10; ++k) {
      const SuperOperator l = random_htp_generator(n, rng);
      const GeneratorSplit a = minimal_split(l);
      const GeneratorSplit b = minimal_split(a.reassemble());
      CHECK(max_abs(a.k_eff - b.k_eff) < 1e-9 * scale_of(l));
      CHECK(max_abs(a.dissipator() - b.dissipator()) < 1e-9 * scale_of(l));
      REQUIRE(a.terms.size() == b.terms.size());
      for (std::size_t i = 0; i < a.terms.size(); ++i)
        CHECK(std::abs(a.terms[i].rate - b.terms[i].rate) < 1e-9 * scale_of(l));
    }
}

TEST_CASE("minimal split rejects non-htp input") {
  Rng rng(37);
  CHECK_THROWS_AS(minimal_split(SuperOperator::identity(2)), PreconditionError);
  CHECK_THROWS_AS(minimal_split(SuperOperator::sandwich(oracle::gaussian(2, 2, rng),
                                                        Operator::Identity(2, 2))),
                  PreconditionError);
}

TEST_CASE("random indefinite unitaries lie in U(p, q)") {
  Rng rng(38);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) {
      if (p + q == 0) continue;
      const Operator u = random_indefinite_unitary(p, q, 0.5, rng);
      GaugeParams g = GaugeParams::identity(p, q);
      g.upsilon = u;
      CHECK(g.indefinite_unitarity_defect() < 1e-10);
      const Operator j = g.j_matrix();
      CHECK(max_abs(u.adjoint() * j * u - j) < 1e-10);
    }
}

TEST_CASE("generator is invariant under random gauge transformations") {
  Rng rng(39);
  for (int n = 2; n <= 3; ++n)
    for (int inst = 0; inst < 3; ++inst) {
      const SuperOperator l = random_htp_generator(n, rng);
      const GeneratorSplit s = partitioned(minimal_split(l));
      const auto [p, q] = rate_signature(s);
      for (int k = 0; k < 100; ++k) {
        const GaugeParams g = random_gauge(p, q, 0.3, rng);
        const GeneratorSplit t = gauge_transform(s, g);
        CHECK(max_abs(t.reassemble() - l) < 1e-9 * scale_of(l));
      }
    }
}

TEST_CASE("gauge transformations compose as a group") {
  Rng rng(40);
  for (int n = 2; n <= 3; ++n) {
    const GeneratorSplit s = partitioned(minimal_split(random_htp_generator(n, rng)));
    const auto [p, q] = rate_signature(s);
    for (int k = 0; k < 20; ++k) {
      const GaugeParams g1 = random_gauge(p, q, 0.3, rng);
      const GaugeParams g2 = random_gauge(p, q, 0.3, rng);
      const GeneratorSplit twice = gauge_transform(gauge_transform(s, g1), g2);
      const GeneratorSplit once = gauge_transform(s, compose(g2, g1));
      // identity parts included: this pins the composed energy shift
      CHECK(max_abs(twice.k_eff - once.k_eff) < 1e-10);
      CHECK(max_abs(twice.kossakowski() - once.kossakowski()) < 1e-10);
    }
  }
}

TEST_CASE("identity gauge leaves the split unchanged and shifts by beta") {
  Rng rng(41);
  const GeneratorSplit s = partitioned(minimal_split(random_htp_generator(2, rng)));
  const auto [p, q] = rate_signature(s);
  GaugeParams g = GaugeParams::identity(p, q);
  g.beta_shift = 0.75;
  const GeneratorSplit t = gauge_transform(s, g);
  CHECK(max_abs(t.k_eff - s.k_eff - 0.75 * Operator::Identity(2, 2)) < 1e-12);
  CHECK(max_abs(t.kossakowski() - s.kossakowski()) < 1e-12);
  GaugeParams bad = GaugeParams::identity(p, q);
  bad.upsilon(0, 0) = 2.0;
  CHECK_THROWS_AS(gauge_transform(s, bad), PreconditionError);
  CHECK_THROWS_AS(gauge_transform(s, GaugeParams::identity(p + 1, q)), PreconditionError);
}

TEST_CASE("shifts never decrease the dissipator norm") {
  Rng rng(42);
  for (int n = 2; n <= 4; ++n)
    for (int inst = 0; inst < 3; ++inst) {
      const GeneratorSplit s = partitioned(minimal_split(random_htp_generator(n, rng)));
      const MinimalityReport r = verify_minimality(s, 100, 7 + inst);
      CHECK(r.trials == 100);
      CHECK(r.violations == 0);
      CHECK(r.strict_failures == 0);
      CHECK(r.min_margin >= -1e-10);
      CHECK(r.max_pythagoras_defect < 1e-9 * std::max(1.0, r.base_norm * r.base_norm));
    }
}

TEST_CASE("norm gain of a shift is the norm of the Hamiltonian change") {
  // |D'|^2 - |D|^2 = 2 Tr(dK_tl^2) / (N (N + 1)) from the basis normalization
  std::mt19937_64 arng(43);
  Rng rng(43);
  for (int n = 2; n <= 4; ++n) {
    const GeneratorSplit s = partitioned(minimal_split(random_htp_generator(n, rng)));
    const auto [p, q] = rate_signature(s);
    const double base = htp_norm(s.dissipator());
    for (int k = 0; k < 20; ++k) {
      const GeneratorSplit t = gauge_transform(s, GaugeParams::shift(random_alphas(p + q, 0.2, arng), p, q));
      Operator dk = t.k_eff - s.k_eff;
      dk -= dk.trace() / static_cast<double>(n) * Operator::Identity(n, n);
      const double expected = 2.0 * (dk * dk).trace().real() / (n * (n + 1.0));
      const double gain = std::pow(htp_norm(t.dissipator()), 2) - base * base;
      CHECK(std::abs(gain - expected) < 1e-9 * std::max(1.0, base * base));
      CHECK(gain > 0.0);
    }
  }
}

TEST_CASE("dissipator action matches the reassembled dissipator") {
  Rng rng(44);
  const GeneratorSplit s = minimal_split(random_htp_generator(3, rng));
  const Operator rho = oracle::random_density(3, rng);
  CHECK(max_abs(dissipator_action(s, rho) - s.dissipator().apply(rho)) < 1e-11);
  CHECK_THROWS_AS(dissipator_action(s, Operator::Identity(2, 2)), DimensionError);
}
