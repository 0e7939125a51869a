#include <doctest.h>

#include "qadd/optimize.hpp"
#include "test_util.hpp"

using namespace qadd;
using namespace qadd::testing;

namespace {

// dense scan of the mixing weight on a two-element hull, with a local refinement
double scan_min(const std::function<double(double)>& f) {
  double best = 1e300, wb = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double w = i / 2000.0;
    const double v = f(w);
    if (v < best) best = v, wb = w;
  }
  for (int i = -200; i <= 200; ++i) {
    const double w = std::clamp(wb + i * 2.5e-6, 0.0, 1.0);
    best = std::min(best, f(w));
  }
  return best;
}

}  // namespace

TEST_CASE("qubit AV minimum over the two-element hull") {
  DensityState rho = plus_state();
  for (double lam : {0.4, 0.44, 0.48}) {
    ConvexSetSpec set = ConvexSetSpec::av_qubit(lam);
    auto ex = extreme_points(set);
    MinimizationResult r = minimize_divergence(rho, set, DivergenceSpec::umegaki());
    const double ref = scan_min([&](double w) {
      Mat s = (ex[0] * (1.0 - w) + ex[1] * w).matrix();
      return -(rho.op().matrix() * ref_log(s)).trace().real();
    });
    CHECK(r.converged);
    CHECK(r.value.value == doctest::Approx(ref).epsilon(1e-9));
    CHECK(r.weights[0] == doctest::Approx(1.0));
    const double p = (1.0 + lam) / 2.0;
    CHECK(r.value.value == doctest::Approx(-(std::log(p) + std::log(1.0 - p)) / 2.0).epsilon(1e-10));
  }
}

TEST_CASE("minimum of D_down over the AV hull") {
  DensityState rho = plus_state();
  for (double lam : {0.4, 0.44, 0.48}) {
    auto ex = extreme_points(ConvexSetSpec::av_qubit(lam));
    MinimizationResult r = minimize_d_down(rho, ex);
    // reversed-line alpha-z divergence near alpha = 1, scanned over the hull
    const double ref = scan_min([&](double w) {
      return reversed_line_qubit(rho.op().matrix(), (ex[0] * (1.0 - w) + ex[1] * w).matrix(), 1.0 - 1e-7);
    });
    CHECK(r.value.value == doctest::Approx(ref).epsilon(1e-5));
    CHECK(r.value.value == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  }
}

TEST_CASE("singlet against the Rains slice gives one ebit") {
  MinimizationResult r = minimize_divergence(werner_state(0.0, 2), ConvexSetSpec::werner_rains(2), DivergenceSpec::umegaki());
  CHECK(r.converged);
  CHECK(r.value.value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("random hulls: certificate vanishes at the optimum and not after perturbation") {
  std::mt19937_64 rng(41);
  const DivergenceSpec specs[] = {DivergenceSpec::umegaki(), DivergenceSpec::petz(0.5), DivergenceSpec::sandwiched(2.0),
                                  DivergenceSpec::alpha_z(0.5, 0.5)};
  for (int inst = 0; inst < 6; ++inst) {
    const int d = 2 + inst % 3;
    DensityState rho(random_state(rng, d));
    std::vector<HermitianOperator> ex;
    for (int i = 0; i < 4; ++i) ex.push_back(random_state(rng, d));
    for (const auto& sp : specs) {
      MinimizationResult r = minimize_over_extremes(rho, ex, sp);
      CHECK(r.converged);
      CHECK(std::abs(r.certificate_gap) <= 1e-7);
      // value is no larger than at any extreme or at the barycentre
      for (const auto& e : ex) CHECK(r.value.value <= divergence(rho, e, sp).value + 1e-12);
      HermitianOperator xi = xi_alpha_z(rho, r.sigma_opt, sp);
      size_t worst = 0;
      for (size_t i = 1; i < ex.size(); ++i)
        if (trace_product(ex[i], xi) < trace_product(ex[worst], xi)) worst = i;
      HermitianOperator pert = r.sigma_opt * 0.99 + ex[worst] * 0.01;
      CHECK(optimality_certificate(rho, pert, ex, sp) > 1e-4);
    }
  }
}

TEST_CASE("minimizer lands on the given state for a singleton set") {
  std::mt19937_64 rng(42);
  DensityState rho(random_state(rng, 3));
  HermitianOperator s = random_state(rng, 3);
  MinimizationResult r = minimize_divergence(rho, ConvexSetSpec::single(s), DivergenceSpec::sandwiched(2.0));
  CHECK(r.value.value == doctest::Approx(divergence(rho, s, DivergenceSpec::sandwiched(2.0)).value));
}

TEST_CASE("hull without a supporting element is rejected") {
  DensityState rho(HermitianOperator::diagonal({0.5, 0.5}));
  try {
    minimize_over_extremes(rho, {HermitianOperator::diagonal({1.0, 0.0})}, DivergenceSpec::umegaki());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSupportElement);
  }
}

TEST_CASE("conditional entropy: Umegaki closed form") {
  std::mt19937_64 rng(43);
  for (int inst = 0; inst < 5; ++inst) {
    HermitianOperator rab = random_state(rng, 4);
    ConditionalResult c = conditional_entropy(DensityState(rab), SystemShape{{2, 2}}, DivergenceSpec::umegaki());
    auto entropy = [](const HermitianOperator& x) {
      double s = 0.0;
      for (int i = 0; i < x.dim(); ++i) {
        double l = x.eig().values(i);
        if (l > 0.0) s -= l * std::log(l);
      }
      return s;
    };
    HermitianOperator rb = partial_trace(rab, SystemShape{{2, 2}}, {0});
    CHECK(c.value == doctest::Approx(entropy(rb) - entropy(rab)).epsilon(1e-10));
  }
}

TEST_CASE("conditional entropy fixed point matches direct minimization") {
  std::mt19937_64 rng(44);
  HermitianOperator rab = random_state(rng, 4);
  DensityState rho(rab);
  const DivergenceSpec sp = DivergenceSpec::alpha_z(2.0, 2.0);
  ConditionalResult c = conditional_entropy(rho, SystemShape{{2, 2}}, sp);
  CHECK(c.fixpoint_residual <= 1e-10);
  // pi_A (x) sigma_B is never beaten by nearby marginals
  const double base = divergence(rho, kron(HermitianOperator::identity(2) * 0.5, c.sigma_b), sp).value;
  CHECK(base == doctest::Approx(c.raw_divergence).epsilon(1e-10));
  for (int k = 0; k < 10; ++k) {
    HermitianOperator other = c.sigma_b * 0.95 + random_state(rng, 2) * 0.05;
    CHECK(divergence(rho, kron(HermitianOperator::identity(2) * 0.5, other), sp).value >= base - 1e-12);
  }
}

TEST_CASE("golden section resolves plateaus to the left end") {
  GoldenResult g = golden_max([](double x) { return std::min(x, 0.3); }, 0.0, 1.0, 1e-10);
  CHECK(g.x == doctest::Approx(0.3).epsilon(1e-6));
  GoldenResult h = golden_max([](double x) { return -(x - 0.7) * (x - 0.7); }, 0.0, 1.0, 1e-10);
  CHECK(h.x == doctest::Approx(0.7).epsilon(1e-7));
}
