#include <doctest.h>

#include <algorithm>

#include "qadd/optimize.hpp"
#include "test_util.hpp"

using namespace qadd;
using namespace qadd::testing;

namespace {

std::vector<ConvexSetSpec> builtin_sets() {
  return {ConvexSetSpec::av_qubit(0.0),    ConvexSetSpec::av_qubit(0.4),    ConvexSetSpec::av_qubit(0.48),
          ConvexSetSpec::werner_rains(2),  ConvexSetSpec::werner_rains(3),  ConvexSetSpec::mana_strange(),
          ConvexSetSpec::single(HermitianOperator::identity(2) * 0.5)};
}

}  // namespace

TEST_CASE("materialized extremes are psd with the declared dimension") {
  for (const auto& s : builtin_sets()) {
    auto ex = extreme_points(s);
    REQUIRE_FALSE(ex.empty());
    for (const auto& e : ex) {
      CHECK(e.dim() == s.base_dim());
      CHECK(is_psd(e));
      CHECK(e.trace() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("av_qubit extremes") {
  auto ex = extreme_points(ConvexSetSpec::av_qubit(0.4));
  REQUIRE(ex.size() == 2);
  CHECK(ex[0](0, 0).real() == doctest::Approx(0.7));
  CHECK(ex[1](0, 1).real() == doctest::Approx(-0.5));
}

TEST_CASE("Werner and mana slice vertices sit on the norm-one boundary") {
  for (int d : {2, 3}) {
    auto vs = werner_slice_vertices(d);
    CHECK(vs.size() >= 2);
    for (const auto& v : vs) {
      HermitianOperator s = sym_state(d) * v.a + asym_state(d) * v.b;
      CHECK(trace_norm(partial_transpose(s, SystemShape{{d, d}}, 1)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  for (const auto& v : mana_slice_vertices()) {
    HermitianOperator s = strange_projector() * v.a + (HermitianOperator::identity(3) - strange_projector()) * (v.b / 2.0);
    CHECK(wigner_norm(s) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Werner builtins") {
  DensityState w0 = werner_state(0.0, 2);
  // the singlet
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(4);
  s(1) = 1.0 / std::sqrt(2.0);
  s(2) = -1.0 / std::sqrt(2.0);
  CHECK((w0.op().matrix() - HermitianOperator::projector(s).matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sym_state(3).trace() == doctest::Approx(1.0));
  CHECK(asym_state(3).trace() == doctest::Approx(1.0));
}

TEST_CASE("qutrit Wigner function is a quasi-probability") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    HermitianOperator r = random_state(rng, 3);
    auto w = qutrit_wigner(r);
    double sum = 0.0;
    for (double x : w) sum += x;
    CHECK(sum == doctest::Approx(1.0));
  }
  // the strange state has the most negative Wigner value -1/3
  auto w = qutrit_wigner(strange_projector());
  CHECK(*std::min_element(w.begin(), w.end()) == doctest::Approx(-1.0 / 3.0));
  // twirling fixes the strange line
  HermitianOperator st = strange_state(0.3).op();
  CHECK((strange_twirl(st).matrix() - st.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("lifting produces symmetrized orbits") {
  ConvexSetSpec set = ConvexSetSpec::av_qubit(0.4);
  for (int n : {1, 2, 3, 4}) {
    LiftedSet ls = lift(set, n);
    CHECK(static_cast<long>(ls.extremes.size()) == binomial(n + 1, 1));
    long total = 0;
    for (const auto& o : ls.orbit_reps) total += o.multiplicity;
    CHECK(total == (1L << n));
    for (const auto& e : ls.extremes) {
      CHECK(e.dim() == (1 << n));
      CHECK(is_psd(e));
      // permutation invariant
      if (n == 2) CHECK((permute_systems(e, SystemShape{{2, 2}}, {1, 0}).matrix() - e.matrix()).norm() < 1e-14);
    }
  }
  LiftedSet w = lift(ConvexSetSpec::werner_rains(2), 2);
  const long k = static_cast<long>(w.base_extremes.size());
  CHECK(static_cast<long>(w.extremes.size()) == binomial(k + 1, 2));
  CHECK_THROWS_AS(lift(ConvexSetSpec::av_qubit(0.4), 13), Error);
  CHECK_THROWS_AS(lift(ConvexSetSpec::product_marginal(2, 2), 2), Error);
}

TEST_CASE("support function is multiplicative on lifted hulls") {
  std::mt19937_64 rng(32);
  for (double lam : {0.0, 0.4, 0.48}) {
    ConvexSetSpec set = ConvexSetSpec::av_qubit(lam);
    LiftedSet l2 = lift(set, 2);
    LiftedSet l3 = lift(set, 3);
    for (int inst = 0; inst < 10; ++inst) {
      HermitianOperator x = random_state(rng, 2) * 3.0, y = random_state(rng, 2), z = random_state(rng, 2) * 0.5;
      const double hx = support_function(set, x).value, hy = support_function(set, y).value;
      const double hz = support_function(set, z).value;
      const double h2 = support_function(l2, kron(x, y)).value;
      const double h3 = support_function(l3, kron(kron(x, y), z)).value;
      CHECK(std::abs(h2 - hx * hy) <= 1e-9 * std::abs(hx * hy));
      CHECK(std::abs(h3 - hx * hy * hz) <= 1e-9 * std::abs(hx * hy * hz));
    }
  }
}

TEST_CASE("product marginal support function") {
  std::mt19937_64 rng(33);
  HermitianOperator x = random_state(rng, 4);
  ConvexSetSpec pm = ConvexSetSpec::product_marginal(2, 2);
  const double h = support_function(pm, x).value;
  // brute force over pure sigma_B on a grid of the Bloch sphere
  double best = -1.0;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j < 120; ++j) {
      const double th = M_PI * i / 60.0, ph = 2.0 * M_PI * j / 120.0;
      Eigen::VectorXcd v(2);
      v << std::cos(th / 2.0), std::polar(std::sin(th / 2.0), ph);
      best = std::max(best, trace_product(kron(HermitianOperator::identity(2) * 0.5, HermitianOperator::projector(v)), x));
    }
  CHECK(h >= best - 1e-12);
  CHECK(h <= best + 1e-3);
  CHECK_FALSE(pm.finitely_generated());
}

TEST_CASE("shipped sets contain an element whose support covers the paired state") {
  const std::pair<DensityState, ConvexSetSpec> cases[] = {
      {plus_state(), ConvexSetSpec::av_qubit(0.4)},
      {werner_state(0.0, 2), ConvexSetSpec::werner_rains(2)},
      {strange_state(1.0), ConvexSetSpec::mana_strange()},
  };
  for (const auto& [rho, set] : cases) {
    auto ex = extreme_points(set);
    HermitianOperator avg = mix(ex, std::vector<double>(ex.size(), 1.0 / ex.size()));
    CHECK(support_contains(avg, rho.op()));
  }
}
