#pragma once

#include <string>
#include <vector>

#include "qadd/optimize.hpp"

namespace qadd {

enum class Verdict { Additive, NonAdditive, Inconclusive };
const char* to_string(Verdict v);

struct CertifyOptions {
  double rel_tol = 1e-8;
  double t_window_k = 4.0;   // window half-width in units of 2 pi / g_min
  int grid = 4096;           // samples per block of length 2 pi / g_min
  int refine_top = 5;
  double certificate_tol = 1e-7;  // required optimizer gap, relative to 1 + |Q|
  MinimizeOptions minimize;
};

struct SearchMeta {
  std::string method;  // commuting | line | absolute_bound | window
  double t_window = 0.0;
  long samples = 0;
  int refinements = 0;
  bool exhaustive = false;  // all frequencies commensurate and a full period was scanned
};

struct AdditivityCertificate {
  Verdict verdict = Verdict::Inconclusive;
  double sup_value = 0.0;  // best value of g_tau(t) found
  double upper_bound = 0.0;  // max over tau of the absolute coefficient sum
  double q_value = 0.0;
  double margin = 0.0;  // sup_value - q_value
  double witness_t = 0.0;
  int witness_tau = 0;
  bool commuting = false;
  SearchMeta search;
  HermitianOperator sigma0;
  std::vector<double> weights;
  double optimizer_gap = 0.0;
};

// g_tau(t) = sum_jk c_jk exp(-i t omega_jk), omega_jk = (log mu_j - log mu_k)/2 in sigma0's eigenbasis
struct TrigPolynomial {
  double c0 = 0.0;                // zero-frequency part (real)
  std::vector<double> omega;      // positive frequencies, ascending
  std::vector<cplx> coeff;        // g = c0 + 2 Re sum coeff_m exp(-i t omega_m)
  double eval(double t) const;
  double abs_bound() const;
};

// Tr[tau sigma^{-(1-th+it)/2} chi sigma^{-(1-th-it)/2}], th = (1-alpha)/z
TrigPolynomial g_tau_expansion(const HermitianOperator& tau, const HermitianOperator& chi,
                               const HermitianOperator& sigma0, double theta);
// the same quantity from complex matrix powers, used to re-check witnesses
double g_tau_direct(const HermitianOperator& tau, const HermitianOperator& chi, const HermitianOperator& sigma0,
                    double theta, double t);

// minimizes first, then checks the additivity condition at the optimizer
AdditivityCertificate additivity_check(const DensityState& rho, const ConvexSetSpec& set, const DivergenceSpec& spec,
                                       const CertifyOptions& opts = {});
AdditivityCertificate additivity_check(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                       const DivergenceSpec& spec, const CertifyOptions& opts = {});
// condition at a given optimizer; the caller is responsible for optimality
AdditivityCertificate additivity_check_at(const DensityState& rho, const HermitianOperator& sigma0,
                                          const std::vector<HermitianOperator>& extremes, const DivergenceSpec& spec,
                                          const CertifyOptions& opts = {});

struct ViolationValue {
  double closed = 0.0;
  double quadrature = 0.0;
};
// f_p(n) = int h(t)^n beta_0(t) dt, h(t) = |<-|sigma^{-(1+it)/2}|+>|^2, sigma = diag(p, 1-p)
ViolationValue violation_integral(double p, int n);
double violation_closed(double p, int n);
double violation_quadrature(double p, int n);

struct NCopyResult {
  double value_n = 0.0;
  double value_1 = 0.0;
  double gap = 0.0;  // value_n - n value_1
  MinimizationResult result_n;
  MinimizationResult result_1;
};
NCopyResult ncopy_brute_min(const DensityState& rho, const ConvexSetSpec& set, int n, const DivergenceSpec& spec,
                            const MinimizeOptions& opts = {}, long size_cap = kDefaultSizeCap);

enum class PairVerdict { Additive, PairwiseAdditive, NotCertified };
const char* to_string(PairVerdict v);

struct StrongAdditivity {
  AdditivityCertificate cert1, cert2;
  PairVerdict verdict = PairVerdict::NotCertified;
};
StrongAdditivity strong_additivity_check(const DensityState& rho1, const ConvexSetSpec& set1,
                                         const DensityState& rho2, const ConvexSetSpec& set2,
                                         const DivergenceSpec& spec, const CertifyOptions& opts = {});

}  // namespace qadd
