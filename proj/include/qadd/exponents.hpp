#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qadd/certify.hpp"

namespace qadd {

enum class ExponentKind { Stein, Chernoff, Hoeffding, StrongConverse };
const char* to_string(ExponentKind k);

struct ExponentOptions {
  int n_max = 3;  // finite-n Stein upper bounds for n = 1..n_max
  long size_cap = kDefaultSizeCap;
  int alpha_grid = 200;
  double alpha_max = 200.0;
  CertifyOptions certify;
  SaddleOptions saddle;
};

struct ExponentReport {
  ExponentKind kind = ExponentKind::Stein;
  std::optional<double> rate;
  std::optional<double> value;  // single-letter value when certified
  double lower = 0.0;
  double upper = 0.0;
  bool certified = false;
  bool window_approximate = false;
  std::vector<int> n_used;
  std::vector<double> upper_by_n;  // running minimum of value_n / n
  std::optional<double> alpha0;
  std::vector<double> sigma0_weights;
  std::optional<AdditivityCertificate> certificate;
  std::optional<SaddleReport> saddle;
  // strong converse diagnostics: D(rho||S), min D_max, r_inf estimate
  std::optional<double> d_min, dmax_min, r_inf;
  std::vector<std::string> notes;
};

ExponentReport stein_report(const DensityState& rho, const ConvexSetSpec& set, const ExponentOptions& opts = {});
ExponentReport chernoff_report(const DensityState& rho, const ConvexSetSpec& set, const ExponentOptions& opts = {});
ExponentReport hoeffding_report(const DensityState& rho, const ConvexSetSpec& set, double r,
                                const ExponentOptions& opts = {});
ExponentReport strong_converse_report(const DensityState& rho, const ConvexSetSpec& set, double r,
                                      const ExponentOptions& opts = {});

// sup over alpha in (1, alpha_max] and alpha = inf of ((alpha-1)/alpha)(r - m(alpha)),
// m(alpha) = min over the hull of the sandwiched divergence; alpha0 = inf is reported as +infinity
struct AntiDivergence {
  double value = 0.0;
  double alpha0 = 0.0;
  std::vector<double> weights;
};
AntiDivergence hoeffding_anti_divergence(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                         double r, double scale = 1.0, const ExponentOptions& opts = {});

struct TestOperator {
  HermitianOperator op;
  int n_copies = 1;
};

// T = int_0^1 dt (sin((1-a)pi)/pi) int_0^inf l^{1-a} (l + C_t)^{-1} A^a (l + C_t)^{-1} dl, C_t = tA + (1-t)B
TestOperator audenaert_test(const HermitianOperator& a, const HermitianOperator& b, double alpha, int n_copies = 1);
// the literal double integral (Gauss-Legendre in t and in mu with l = mu/(1-mu)); slow, for cross-checks
HermitianOperator audenaert_test_double_quadrature(const HermitianOperator& a, const HermitianOperator& b,
                                                   double alpha, int nt = 64, int nmu = 128);
// test built against the hull element maximizing Tr[A^a B^{1-a}], A = rho^{(x)n}
TestOperator audenaert_test_for_set(const DensityState& rho, const ConvexSetSpec& set, double alpha, int n = 1);

struct TestErrors {
  double type1 = 0.0;
  double type2 = 0.0;
};
TestErrors evaluate_test(const TestOperator& t, const DensityState& rho, const ConvexSetSpec& set);

// max over conv(S^{(x)n}) of Tr[A^a B^{1-a}] with A = rho^{(x)n}
double max_alpha_trace(const DensityState& rho, const ConvexSetSpec& set, double alpha, int n = 1);

}  // namespace qadd
