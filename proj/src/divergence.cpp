#include "qadd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace qadd {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kEps = 1e-12;
}  // namespace

double DivergenceSpec::z() const {
  switch (kind) {
    case ZKind::Explicit: return z_explicit;
    case ZKind::AlphaLinked: return alpha;
    case ZKind::PetzOne: return 1.0;
    case ZKind::ReversedLine: return std::abs(1.0 - alpha);
  }
  return 1.0;
}

double DivergenceSpec::theta() const {
  if (is_max()) return -1.0;
  return (1.0 - alpha) / z();
}

bool DivergenceSpec::in_dp_region() const {
  if (!(alpha > 0.0)) return false;
  if (is_max()) return kind == ZKind::AlphaLinked;
  const double zz = z();
  if (!(zz > 0.0)) return false;
  if (alpha == 1.0) return true;
  if (alpha < 1.0) return zz >= std::max(alpha, 1.0 - alpha) - kEps;
  return zz >= std::max(alpha / 2.0, alpha - 1.0) - kEps && zz <= alpha + kEps;
}

bool DivergenceSpec::on_line() const {
  if (alpha == 1.0 || is_max()) return false;
  return std::abs(std::abs(1.0 - alpha) / z() - 1.0) <= kEps;
}

bool DivergenceSpec::convex_in_sigma() const {
  return in_dp_region() || (alpha < 1.0 && alpha > 0.0 && on_line());
}

std::string DivergenceSpec::label() const {
  std::ostringstream os;
  if (is_umegaki()) return "umegaki";
  if (is_max()) return "max";
  os << "alpha=" << alpha << ",z=" << z();
  return os.str();
}

double delta_divided(const ScalarFn& f, double x, double y) {
  require(x > 0.0 && y > 0.0, ErrorCode::InvalidArgument, "divided difference needs positive arguments");
  return f.divided(x, y);
}

double beta_density(double theta, double t) {
  require(std::abs(theta) < 1.0, ErrorCode::InvalidArgument, "beta density needs |theta| < 1");
  // 1/(cosh(pi t) + c) = 2 e^{-pi|t|} / (1 + 2c e^{-pi|t|} + e^{-2 pi|t|})
  const double e = std::exp(-kPi * std::abs(t));
  if (std::abs(theta) <= 1e-8) {
    return kPi / 2.0 * 2.0 * e / (1.0 + 2.0 * e + e * e);
  }
  const double c = std::cos(theta * kPi);
  return std::sin(theta * kPi) / (2.0 * theta) * 2.0 * e / (1.0 + 2.0 * c * e + e * e);
}

cplx beta_quadrature(const std::function<cplx(double)>& g, double theta, double tol) {
  require(std::abs(theta) < 1.0, ErrorCode::InvalidArgument, "beta quadrature needs |theta| < 1");
  constexpr double T = 12.0;
  boost::math::quadrature::tanh_sinh<double> ts(15);
  double sum_re = 0.0, sum_im = 0.0, worst = 0.0, l1 = 0.0;
  for (int half = 0; half < 2; ++half) {
    const double a = half == 0 ? -T : 0.0, b = half == 0 ? 0.0 : T;
    for (int part = 0; part < 2; ++part) {
      auto f = [&](double t) {
        cplx v = g(t) * beta_density(theta, t);
        return part == 0 ? v.real() : v.imag();
      };
      double err = 0.0, L = 0.0;
      double v = ts.integrate(f, a, b, tol, &err, &L);
      (part == 0 ? sum_re : sum_im) += v;
      worst = std::max(worst, err);
      l1 += L;
    }
  }
  if (!(worst <= 1e-8 * std::max(1.0, l1)) || !std::isfinite(sum_re) || !std::isfinite(sum_im))
    fail(ErrorCode::QuadratureNonConvergent, "beta quadrature did not converge");
  return {sum_re, sum_im};
}

bool orthogonal(const HermitianOperator& rho, const HermitianOperator& sigma) {
  return trace_product(rho, sigma) <= 1e-12;
}

ExtendedValue umegaki(const DensityState& rho, const HermitianOperator& sigma) {
  if (!support_contains(sigma, rho.op())) return ExtendedValue::infinite();
  RVec r = clamped_spectrum(rho.op());
  double neg_ent = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (r(i) > 0.0) neg_ent += r(i) * std::log(r(i));
  double cross = trace_product(rho.op(), mlog(sigma));
  return ExtendedValue::of(neg_ent - cross);
}

namespace {

// singular values of G = rho^a sigma^(th/2), taken in the two eigenbases where G = D_rho C D_sigma with C unitary;
// pivoted Jacobi keeps small singular values accurate relative to themselves, which matters once they are raised to z < 1
struct CoreFactor {
  RVec s;
  Mat x;  // rho^a U, U the left singular vectors
};

CoreFactor core_factor(const HermitianOperator& rho, const HermitianOperator& sigma, double a, double th, bool vectors) {
  const RVec r = clamped_spectrum(rho), mu = clamped_spectrum(sigma);
  const Mat& ur = rho.eig().vectors;
  const int d = rho.dim();
  RVec dr(d), ds(d);
  for (int i = 0; i < d; ++i) {
    dr(i) = r(i) > 0.0 ? std::pow(r(i), a) : 0.0;
    ds(i) = mu(i) > 0.0 ? std::pow(mu(i), th / 2.0) : 0.0;
  }
  Mat g = dr.asDiagonal() * (ur.adjoint() * sigma.eig().vectors) * ds.asDiagonal();
  Eigen::JacobiSVD<Mat, Eigen::ColPivHouseholderQRPreconditioner> svd(g, vectors ? Eigen::ComputeFullU : 0);
  CoreFactor cf;
  cf.s = svd.singularValues();
  const double cliff = kRankTol * (cf.s.size() ? cf.s(0) : 0.0);
  for (int i = 0; i < cf.s.size(); ++i)
    if (cf.s(i) <= cliff) cf.s(i) = 0.0;
  if (vectors) cf.x = ur * (dr.asDiagonal() * svd.matrixU());
  return cf;
}

}  // namespace

QDValue q_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec) {
  require(rho.dim() == sigma.dim(), ErrorCode::ShapeMismatch, "rho and sigma dimensions differ");
  require(spec.alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be positive");
  if (spec.is_max()) {
    ExtendedValue d = d_max(rho, sigma);
    return {d.finite() ? ExtendedValue::of(std::exp(d.value)) : ExtendedValue::infinite(), d};
  }
  if (spec.is_umegaki()) {
    ExtendedValue d = umegaki(rho, sigma);
    return {d.finite() ? ExtendedValue::of(1.0) : ExtendedValue::infinite(), d};
  }
  const double a = spec.alpha, z = spec.z();
  require(z > 0.0, ErrorCode::InvalidArgument, "z must be positive");
  if (a < 1.0 && orthogonal(rho.op(), sigma)) return {ExtendedValue::infinite(), ExtendedValue::infinite()};
  if (a > 1.0 && !support_contains(sigma, rho.op())) return {ExtendedValue::infinite(), ExtendedValue::infinite()};
  CoreFactor cf = core_factor(rho.op(), sigma, a / (2.0 * z), spec.theta(), false);
  double q = 0.0;
  for (int i = 0; i < cf.s.size(); ++i)
    if (cf.s(i) > 0.0) q += std::pow(cf.s(i), 2.0 * z);
  if (!(q > 0.0)) return {ExtendedValue::infinite(), ExtendedValue::infinite()};
  return {ExtendedValue::of(q), ExtendedValue::of(std::log(q) / (a - 1.0))};
}

ExtendedValue divergence(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec) {
  return q_alpha_z(rho, sigma, spec).D;
}

ExtendedValue d_zero(const DensityState& rho, const HermitianOperator& sigma) {
  if (orthogonal(rho.op(), sigma)) return ExtendedValue::infinite();
  double t = trace_product(support_projector(rho.op()), sigma);
  if (!(t > 0.0)) return ExtendedValue::infinite();
  return ExtendedValue::of(-std::log(t));
}

ExtendedValue d_max(const DensityState& rho, const HermitianOperator& sigma) {
  if (!support_contains(sigma, rho.op())) return ExtendedValue::infinite();
  HermitianOperator s = mpow(sigma, -0.5);
  HermitianOperator x = HermitianOperator::from_raw(s.matrix() * rho.op().matrix() * s.matrix());
  double l = x.eig().values.maxCoeff();
  return ExtendedValue::of(std::log(l));
}

Mat descending_basis(const DensityState& rho) {
  const Mat& U = rho.op().eig().vectors;
  return U.rowwise().reverse();
}

ExtendedValue d_down(const DensityState& rho, const HermitianOperator& sigma) {
  const int d = rho.dim();
  RVec r = clamped_spectrum(rho.op()).reverse();
  Mat V = descending_basis(rho);
  Mat s = V.adjoint() * sigma.matrix() * V;
  const double scale = std::max(1e-300, sigma.max_abs());
  double prev = 1.0, val = 0.0;
  for (int k = 1; k <= d; ++k) {
    if (!(r(k - 1) > 0.0)) break;  // remaining weights vanish
    double nu = s.topLeftCorner(k, k).determinant().real();
    double pivot = nu / prev;
    if (!(pivot > 1e-12 * scale)) return ExtendedValue::infinite();
    val += r(k - 1) * (std::log(r(k - 1)) - std::log(pivot));
    prev = nu;
  }
  return ExtendedValue::of(val);
}

HermitianOperator chi_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec) {
  require(!spec.is_max(), ErrorCode::InvalidArgument, "chi is undefined at alpha = inf");
  if (spec.is_umegaki()) {
    require(support_contains(sigma, rho.op()), ErrorCode::SupportViolation, "supp(rho) not inside supp(sigma)");
    return rho.op();
  }
  const double a = spec.alpha, z = spec.z();
  if (a < 1.0) require(!orthogonal(rho.op(), sigma), ErrorCode::SupportViolation, "rho is orthogonal to sigma");
  if (a > 1.0)
    require(support_contains(sigma, rho.op()), ErrorCode::SupportViolation, "supp(rho) not inside supp(sigma)");
  // chi = rho^a M^(z-1) rho^a with M = G G*, so rho^a M^(z-1) rho^a = X diag(s^(2z-2)) X*, X = rho^a U
  CoreFactor cf = core_factor(rho.op(), sigma, a / (2.0 * z), spec.theta(), true);
  RVec w(cf.s.size());
  for (int i = 0; i < w.size(); ++i) w(i) = cf.s(i) > 0.0 ? std::pow(cf.s(i), 2.0 * z - 2.0) : 0.0;
  return HermitianOperator::from_raw(cf.x * w.asDiagonal() * cf.x.adjoint());
}

HermitianOperator xi_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec) {
  HermitianOperator chi = chi_alpha_z(rho, sigma, spec);
  const double th = spec.is_umegaki() ? 0.0 : spec.theta();
  if (std::abs(th - 1.0) <= kEps) return chi;  // z = 1 - alpha
  RVec mu = clamped_spectrum(sigma);
  const Mat& U = sigma.eig().vectors;
  Mat cb = U.adjoint() * chi.matrix() * U;
  const ScalarFn f = std::abs(th) <= 1e-12 ? ScalarFn::log() : ScalarFn::power(th);
  const double scale = std::abs(th) <= 1e-12 ? 1.0 : 1.0 / th;
  const int d = sigma.dim();
  Mat xb = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if (mu(j) > 0.0 && mu(k) > 0.0) xb(j, k) = f.divided(mu(j), mu(k)) * scale * cb(j, k);
  return HermitianOperator::from_raw(U * xb * U.adjoint());
}

HermitianOperator xi_alpha_z_quadrature(const DensityState& rho, const HermitianOperator& sigma,
                                        const DivergenceSpec& spec) {
  HermitianOperator chi = chi_alpha_z(rho, sigma, spec);
  const double th = spec.is_umegaki() ? 0.0 : spec.theta();
  require(std::abs(th) < 1.0, ErrorCode::InvalidArgument, "integral form needs |theta| < 1");
  RVec mu = clamped_spectrum(sigma);
  const Mat& U = sigma.eig().vectors;
  Mat cb = U.adjoint() * chi.matrix() * U;
  const int d = sigma.dim();
  Mat xb = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      if (!(mu(j) > 0.0 && mu(k) > 0.0)) continue;
      const double lj = std::log(mu(j)), lk = std::log(mu(k));
      auto g = [&](double t) {
        cplx ej = std::exp(-cplx(1.0 - th, t) * lj / 2.0);
        cplx ek = std::exp(-cplx(1.0 - th, -t) * lk / 2.0);
        return ej * ek;
      };
      cplx w = beta_quadrature(g, th);
      xb(j, k) = w * cb(j, k);
      if (j != k) xb(k, j) = std::conj(w) * cb(k, j);
    }
  return HermitianOperator::from_raw(U * xb * U.adjoint());
}

}  // namespace qadd
