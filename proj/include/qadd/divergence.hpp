#pragma once

#include <functional>
#include <limits>
#include <string>

#include "qadd/opcore.hpp"

namespace qadd {

enum class ZKind { Explicit, AlphaLinked, PetzOne, ReversedLine };

struct DivergenceSpec {
  double alpha = 1.0;  // +inf allowed for the sandwiched family
  ZKind kind = ZKind::PetzOne;
  double z_explicit = 1.0;

  static DivergenceSpec umegaki() { return {1.0, ZKind::PetzOne, 1.0}; }
  static DivergenceSpec petz(double a) { return {a, ZKind::PetzOne, 1.0}; }
  static DivergenceSpec sandwiched(double a) { return {a, ZKind::AlphaLinked, a}; }
  // z = |1 - alpha|
  static DivergenceSpec reversed(double a) { return {a, ZKind::ReversedLine, std::abs(1.0 - a)}; }
  static DivergenceSpec alpha_z(double a, double z) { return {a, ZKind::Explicit, z}; }

  double z() const;
  double theta() const;  // (1 - alpha) / z
  bool is_umegaki() const { return alpha == 1.0; }
  bool is_max() const { return alpha == std::numeric_limits<double>::infinity(); }
  bool in_dp_region() const;
  // |1 - alpha| / z = 1
  bool on_line() const;
  // D(rho||.) convex on the positive cone: the DP region plus the z = 1 - alpha line
  bool convex_in_sigma() const;
  std::string label() const;
};

// +inf is flagged by support_ok == false; value then holds +inf as well
struct ExtendedValue {
  double value = 0.0;
  bool support_ok = true;

  bool finite() const { return support_ok; }
  static ExtendedValue of(double v) { return {v, true}; }
  static ExtendedValue infinite() { return {std::numeric_limits<double>::infinity(), false}; }
};

struct QDValue {
  // when !support_ok, Q is 0 (alpha < 1) or +inf (alpha > 1); D is +inf
  ExtendedValue Q;
  ExtendedValue D;
};

double delta_divided(const ScalarFn& f, double x, double y);

double beta_density(double theta, double t);
// integral of g against beta_theta on [-T, T], T = 12; adaptive double-exponential rule
cplx beta_quadrature(const std::function<cplx(double)>& g, double theta, double tol = 1e-12);

bool orthogonal(const HermitianOperator& rho, const HermitianOperator& sigma);

ExtendedValue umegaki(const DensityState& rho, const HermitianOperator& sigma);
QDValue q_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec);
ExtendedValue divergence(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec);
ExtendedValue d_zero(const DensityState& rho, const HermitianOperator& sigma);
ExtendedValue d_max(const DensityState& rho, const HermitianOperator& sigma);
ExtendedValue d_down(const DensityState& rho, const HermitianOperator& sigma);

// rho's eigenbasis ordered by decreasing eigenvalue (columns)
Mat descending_basis(const DensityState& rho);

HermitianOperator chi_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec);
// closed form via divided differences in sigma's eigenbasis, restricted to supp(sigma)
HermitianOperator xi_alpha_z(const DensityState& rho, const HermitianOperator& sigma, const DivergenceSpec& spec);
// the integral form: beta quadrature of sigma^{-(1-th+it)/2} chi sigma^{-(1-th-it)/2}
HermitianOperator xi_alpha_z_quadrature(const DensityState& rho, const HermitianOperator& sigma,
                                        const DivergenceSpec& spec);

}  // namespace qadd
