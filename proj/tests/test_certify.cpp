#include <doctest.h>

#include "qadd/certify.hpp"
#include "test_util.hpp"

using namespace qadd;
using namespace qadd::testing;

TEST_CASE("trigonometric expansion agrees with complex matrix powers") {
  std::mt19937_64 rng(51);
  for (int inst = 0; inst < 5; ++inst) {
    DensityState rho(random_state(rng, 3));
    HermitianOperator sigma = random_state(rng, 3), tau = random_state(rng, 3);
    for (const auto& sp : {DivergenceSpec::umegaki(), DivergenceSpec::sandwiched(2.0), DivergenceSpec::petz(0.5)}) {
      const double th = sp.is_umegaki() ? 0.0 : sp.theta();
      HermitianOperator chi = chi_alpha_z(rho, sigma, sp);
      TrigPolynomial g = g_tau_expansion(tau, chi, sigma, th);
      for (double t : {0.0, 0.37, -2.1, 15.0}) CHECK(g.eval(t) == doctest::Approx(g_tau_direct(tau, chi, sigma, th, t)).epsilon(1e-10));
      CHECK(g.abs_bound() >= std::abs(g.eval(1.3)) - 1e-12);
      // averaged against beta_theta the expansion is Tr[tau Xi]
      const cplx avg = beta_quadrature([&](double t) { return cplx(g.eval(t), 0.0); }, th);
      CHECK(avg.real() == doctest::Approx(trace_product(tau, xi_alpha_z(rho, sigma, sp))).epsilon(1e-8));
    }
  }
}

TEST_CASE("qubit AV: witness for lambda = 0.4, additive for lambda = 0") {
  AdditivityCertificate c0 = additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.0), DivergenceSpec::umegaki());
  CHECK(c0.verdict == Verdict::Additive);
  const double lam = 0.4;
  AdditivityCertificate c = additivity_check(plus_state(), ConvexSetSpec::av_qubit(lam), DivergenceSpec::umegaki());
  CHECK(c.verdict == Verdict::NonAdditive);
  const double formula = 1.0 / (1.0 - lam * lam) + 1.0 / std::sqrt(1.0 - lam * lam);
  CHECK(c.sup_value >= formula - 1e-6);
  CHECK(c.sup_value <= formula + 1e-6);
  CHECK(c.witness_tau == 1);
  CHECK(c.margin == doctest::Approx(c.sup_value - 1.0));
}

TEST_CASE("commuting optimizers certify directly") {
  AdditivityCertificate w = additivity_check(werner_state(0.0, 2), ConvexSetSpec::werner_rains(2), DivergenceSpec::umegaki());
  CHECK(w.verdict == Verdict::Additive);
  CHECK(w.commuting);
  AdditivityCertificate s = additivity_check(strange_state(1.0), ConvexSetSpec::mana_strange(), DivergenceSpec::sandwiched(2.0));
  CHECK(s.verdict == Verdict::Additive);
}

TEST_CASE("line case: n-copy gap vanishes") {
  std::mt19937_64 rng(52);
  for (double a : {0.3, 0.7}) {
    DensityState rho(random_state(rng, 2));
    std::vector<HermitianOperator> ex{random_state(rng, 2), random_state(rng, 2), random_state(rng, 2)};
    NCopyResult r = ncopy_brute_min(rho, ConvexSetSpec::hull(ex), 2, DivergenceSpec::alpha_z(a, 1.0 - a));
    CHECK(std::abs(r.gap) <= 1e-7);
    AdditivityCertificate c = additivity_check(rho, ex, DivergenceSpec::alpha_z(a, 1.0 - a));
    CHECK(c.verdict == Verdict::Additive);
    CHECK(c.search.method == "line");
  }
}

TEST_CASE("n-copy minimum is subadditive") {
  std::mt19937_64 rng(53);
  DensityState rho(random_state(rng, 2));
  std::vector<HermitianOperator> ex{random_state(rng, 2), random_state(rng, 2)};
  for (const auto& sp : {DivergenceSpec::umegaki(), DivergenceSpec::sandwiched(2.0)}) {
    NCopyResult r = ncopy_brute_min(rho, ConvexSetSpec::hull(ex), 2, sp);
    CHECK(r.gap <= 1e-9);
  }
}

TEST_CASE("pair verdicts") {
  const DivergenceSpec u = DivergenceSpec::umegaki();
  StrongAdditivity both = strong_additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.0), werner_state(0.0, 2),
                                                  ConvexSetSpec::werner_rains(2), u);
  CHECK(both.verdict == PairVerdict::Additive);
  StrongAdditivity one = strong_additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.4), werner_state(0.0, 2),
                                                 ConvexSetSpec::werner_rains(2), u);
  CHECK(one.verdict == PairVerdict::PairwiseAdditive);
  StrongAdditivity none = strong_additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.4), plus_state(),
                                                  ConvexSetSpec::av_qubit(0.44), u);
  CHECK(none.verdict == PairVerdict::NotCertified);
}

TEST_CASE("tighter search options do not change the verdict") {
  CertifyOptions o;
  o.grid = 16384;
  o.t_window_k = 8.0;
  AdditivityCertificate c = additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.4), DivergenceSpec::umegaki(), o);
  CHECK(c.verdict == Verdict::NonAdditive);
  CHECK(c.search.samples > 0);
}

TEST_CASE("certifier refuses specs outside the data-processing region") {
  CHECK_THROWS_AS(additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.4), DivergenceSpec::alpha_z(0.3, 0.2)), Error);
}
