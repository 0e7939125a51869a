#include <cmath>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qadd/certify.hpp"

namespace qadd {

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;
constexpr double kPi = boost::math::constants::pi<double>();

void check_args(double p, int n) {
  require(p > 0.5 && p < 1.0, ErrorCode::InvalidArgument, "p must lie in (1/2, 1)");
  require(n >= 1 && n <= 200, ErrorCode::InvalidArgument, "n must lie in [1, 200]");
}

}  // namespace

double violation_closed(double p, int n) {
  check_args(p, n);
  const Big lp = log(Big(p)), lq = log(Big(1.0 - p));
  std::vector<Big> x(n + 1), lx(n + 1), binom(n + 1);
  binom[0] = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom[k] = binom[k - 1] * (n - k + 1) / k;
    lx[k] = k * lp + (n - k) * lq;
    x[k] = exp(lx[k]);
  }
  // Delta_log(x_k, x_k) = 1/x_k; off-diagonal pairs counted twice
  Big sum = 0;
  for (int k = 0; k <= n; ++k) {
    sum += binom[k] * binom[k] / x[k];
    for (int l = k + 1; l <= n; ++l) {
      Big term = binom[k] * binom[l] * (lx[k] - lx[l]) / (x[k] - x[l]);
      if ((k + l) % 2) sum -= 2 * term;
      else sum += 2 * term;
    }
  }
  sum /= pow(Big(4), n);
  return static_cast<double>(sum);
}

double violation_quadrature(double p, int n) {
  check_args(p, n);
  const double q = 1.0 - p;
  const double c = std::log(p / q) / 2.0;
  const double a = (1.0 / p + 1.0 / q) / 4.0, b = 1.0 / (2.0 * std::sqrt(p * q));
  // per-copy factor, also written as (1/p + 1/q - 2 cos(c t)/sqrt(pq))/4
  auto h = [&](double t) { return std::max(0.0, a - b * std::cos(c * t)); };
  auto f = [&](double t) { return std::pow(h(t), n) * beta_density(0.0, t); };
  const double half = kPi / c;  // h is monotone between multiples of pi/c
  const double hmax = a + b;
  double total = 0.0, worst = 0.0;
  for (int seg = 0; seg < 100000; ++seg) {
    const double lo = seg * half, hi = lo + half;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14, &err);
    worst += err;
    // remaining tail: hmax^n * int_hi^inf beta_0 <= hmax^n * pi e^{-pi hi}
    const double tail = std::exp(n * std::log(hmax) - kPi * hi) * kPi;
    if (tail <= 1e-16 * total) break;
  }
  total *= 2.0;  // even integrand
  if (!std::isfinite(total) || worst * 2.0 > 1e-10 * std::max(total, 1e-300))
    fail(ErrorCode::QuadratureNonConvergent, "f_p(n) quadrature did not converge");
  return total;
}

ViolationValue violation_integral(double p, int n) {
  if (p == 0.5) {
    require(n >= 1 && n <= 200, ErrorCode::InvalidArgument, "n must lie in [1, 200]");
    return {0.0, 0.0};
  }
  return {violation_closed(p, n), violation_quadrature(p, n)};
}

}  // namespace qadd
