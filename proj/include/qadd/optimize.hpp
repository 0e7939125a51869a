#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qadd/divergence.hpp"
#include "qadd/sets.hpp"

namespace qadd {

struct MinimizeOptions {
  double fw_gap_tol = 1e-9;
  int max_iter = 100000;
  double certificate_tol = 1e-7;  // relative to 1 + |Q|
  std::vector<double> warm_start;  // optional initial weights
};

struct MinimizationResult {
  HermitianOperator sigma_opt;
  std::vector<double> weights;
  ExtendedValue value;
  double q_value = 1.0;
  double certificate_gap = 0.0;
  double fw_gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

// differentiable objective on the positive cone: df(sigma)[tau] = Tr[tau G]
struct ConeObjective {
  // returns false on +inf
  std::function<bool(const HermitianOperator& sigma, double& value, HermitianOperator* grad)> eval;
};

struct FWResult {
  std::vector<double> weights;
  HermitianOperator sigma;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

// pairwise Frank-Wolfe over conv{extremes} with exact line search on the directional derivative
FWResult pairwise_frank_wolfe(const std::vector<HermitianOperator>& extremes, const ConeObjective& obj,
                              const MinimizeOptions& opts);

ConeObjective divergence_objective(const DensityState& rho, const DivergenceSpec& spec);
ConeObjective d_down_objective(const DensityState& rho);
ConeObjective d_max_objective(const DensityState& rho);

HermitianOperator mix(const std::vector<HermitianOperator>& extremes, const std::vector<double>& w);

MinimizationResult minimize_over_extremes(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                          const DivergenceSpec& spec, const MinimizeOptions& opts = {});
MinimizationResult minimize_divergence(const DensityState& rho, const ConvexSetSpec& set, const DivergenceSpec& spec,
                                       const MinimizeOptions& opts = {});
MinimizationResult minimize_divergence(const DensityState& rho, const LiftedSet& set, const DivergenceSpec& spec,
                                       const MinimizeOptions& opts = {});
// min over the set of D_down
MinimizationResult minimize_d_down(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                   const MinimizeOptions& opts = {});
// min over the set of D_max (approximate: the objective is not smooth)
MinimizationResult minimize_d_max(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                  const MinimizeOptions& opts = {});

// sup over extremes of Tr[tau Xi] minus Q
double optimality_certificate(const DensityState& rho, const HermitianOperator& sigma0,
                              const std::vector<HermitianOperator>& extremes, const DivergenceSpec& spec);
double optimality_certificate(const DensityState& rho, const HermitianOperator& sigma0, const ConvexSetSpec& set,
                              const DivergenceSpec& spec);

struct FixpointOptions {
  double eta = 0.5;
  double tol = 1e-10;
  int max_iter = 10000;
};

struct ConditionalResult {
  double value = 0.0;           // inf D(rho || pi_A (x) sigma_B) - log d_A
  double raw_divergence = 0.0;  // inf D(rho || pi_A (x) sigma_B)
  HermitianOperator sigma_b;
  double fixpoint_residual = 0.0;
  double certificate_gap = 0.0;
  int iterations = 0;
};

// shape = {d_A, d_B}
ConditionalResult conditional_entropy(const DensityState& rho_ab, const SystemShape& shape, const DivergenceSpec& spec,
                                      const FixpointOptions& opts = {});

struct SaddleReport {
  double alpha0 = 0.0;
  HermitianOperator sigma0;
  std::vector<double> weights;
  double value = 0.0;
  double residual_alpha = 0.0;
  double residual_sigma = 0.0;
  double minimax_gap = 0.0;
  double bracket_width = 0.0;
  bool converged = true;
};

struct SaddleOptions {
  double alpha_tol = 1e-10;
  MinimizeOptions inner;
};

// phi(alpha, sigma) = -log Tr[rho^alpha sigma^(1-alpha)]
double chernoff_phi(const DensityState& rho, const HermitianOperator& sigma, double alpha);
// psi(alpha, sigma) = ((alpha-1)/alpha) r + phi(alpha, sigma)/alpha, with psi(1, .) = 0
double hoeffding_psi(const DensityState& rho, const HermitianOperator& sigma, double alpha, double r);

// min over the set of D_0
double min_d_zero(const DensityState& rho, const std::vector<HermitianOperator>& extremes);

SaddleReport chernoff_saddle(const DensityState& rho, const ConvexSetSpec& set, const SaddleOptions& opts = {});
SaddleReport chernoff_saddle(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                             const SaddleOptions& opts = {});
SaddleReport hoeffding_saddle(const DensityState& rho, const ConvexSetSpec& set, double r,
                              const SaddleOptions& opts = {});
SaddleReport hoeffding_saddle(const DensityState& rho, const std::vector<HermitianOperator>& extremes, double r,
                              const SaddleOptions& opts = {});

// golden-section maximization of a unimodal function; ties on a plateau resolve to the left end
struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  double width = 0.0;
  int evaluations = 0;
};
GoldenResult golden_max(const std::function<double(double)>& f, double a, double b, double tol, int max_eval = 400);

}  // namespace qadd
