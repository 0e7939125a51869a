#include <doctest.h>

#include "qadd/optimize.hpp"
#include "test_util.hpp"

using namespace qadd;
using namespace qadd::testing;

namespace {

// classical Renyi divergence of order a on diagonals
double classical_renyi(const std::vector<double>& p, const std::vector<double>& q, double a) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
  return std::log(s) / (a - 1.0);
}

}  // namespace

TEST_CASE("classical Chernoff anchor") {
  DensityState a(HermitianOperator::diagonal({0.9, 0.1}));
  SaddleReport s = chernoff_saddle(a, std::vector<HermitianOperator>{HermitianOperator::diagonal({0.1, 0.9})});
  CHECK(s.value == doctest::Approx(-std::log(0.6)).epsilon(1e-9));
  CHECK(s.alpha0 == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.converged);
}

TEST_CASE("classical Hoeffding value against a direct scan") {
  const std::vector<double> p{0.9, 0.1}, q{0.5, 0.5};
  DensityState a(HermitianOperator::diagonal(p));
  for (double r : {0.05, 0.2, 0.3}) {
    SaddleReport s = hoeffding_saddle(a, std::vector<HermitianOperator>{HermitianOperator::diagonal(q)}, r);
    double best = 0.0;
    for (int i = 1; i < 200000; ++i) {
      const double al = i / 200000.0;
      best = std::max(best, ((al - 1.0) / al) * (r - classical_renyi(p, q, al)));
    }
    CHECK(s.value == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("Chernoff saddle on the shipped examples") {
  const std::pair<DensityState, ConvexSetSpec> cases[] = {
      {plus_state(), ConvexSetSpec::av_qubit(0.0)},
      {plus_state(), ConvexSetSpec::av_qubit(0.4)},
      {werner_state(0.0, 2), ConvexSetSpec::werner_rains(2)},
      {strange_state(1.0), ConvexSetSpec::mana_strange()},
  };
  for (const auto& [rho, set] : cases) {
    SaddleReport s = chernoff_saddle(rho, set);
    CHECK(s.residual_alpha <= 1e-6);
    CHECK(s.residual_sigma <= 1e-6);
    CHECK(std::abs(s.minimax_gap) <= 1e-6);
    // the value is the min over sigma of max over alpha; it cannot exceed the value at any fixed sigma
    for (const auto& e : extreme_points(set)) {
      double sup = 0.0;
      // the sup can sit at either end of (0, 1)
      for (int i = 0; i <= 400; ++i) sup = std::max(sup, chernoff_phi(rho, e, std::clamp(i / 400.0, 1e-10, 1.0 - 1e-10)));
      CHECK(s.value <= sup + 1e-9);
    }
  }
}

TEST_CASE("Hoeffding saddle on a quantum example") {
  SaddleReport s = hoeffding_saddle(plus_state(), ConvexSetSpec::av_qubit(0.4), 0.75);
  CHECK(s.residual_alpha <= 1e-6);
  CHECK(s.residual_sigma <= 1e-6);
  CHECK(std::abs(s.minimax_gap) <= 1e-6);
  CHECK(s.value > 0.0);
}

TEST_CASE("Hoeffding rate below min D_0 is out of window") {
  DensityState a(HermitianOperator::diagonal({1.0, 0.0}));
  try {
    hoeffding_saddle(a, std::vector<HermitianOperator>{HermitianOperator::diagonal({0.5, 0.5})}, 0.5);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RateOutOfWindow);
  }
}

TEST_CASE("phi and psi conventions") {
  DensityState a(HermitianOperator::diagonal({0.9, 0.1}));
  HermitianOperator s = HermitianOperator::diagonal({0.2, 0.8});
  CHECK(chernoff_phi(a, s, 0.3) == doctest::Approx(-std::log(std::pow(0.9, 0.3) * std::pow(0.2, 0.7) +
                                                               std::pow(0.1, 0.3) * std::pow(0.8, 0.7))));
  CHECK(hoeffding_psi(a, s, 1.0, 0.2) == doctest::Approx(chernoff_phi(a, s, 1.0)));
  CHECK(min_d_zero(a, {s}) == doctest::Approx(0.0));
  DensityState pure(HermitianOperator::diagonal({1.0, 0.0}));
  CHECK(min_d_zero(pure, {s, HermitianOperator::diagonal({0.6, 0.4})}) == doctest::Approx(-std::log(0.6)));
}
