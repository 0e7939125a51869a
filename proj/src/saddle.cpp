#include <algorithm>
#include <cmath>
#include <limits>

#include "qadd/optimize.hpp"

namespace qadd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxLogBeta = 18.420680743952367;  // log(1e8): alpha down to 1e-8

double neg_log(double t) { return t > 0.0 ? -std::log(t) : kInf; }

// d phi(alpha, .)[tau] = Tr[tau G]
bool phi_gradient(const DensityState& rho, const HermitianOperator& sigma, double alpha, HermitianOperator& g) {
  if (alpha <= 0.0) {
    HermitianOperator p = support_projector(rho.op());
    double t = trace_product(p, sigma);
    if (!(t > 0.0)) return false;
    g = p * (-1.0 / t);
    return true;
  }
  if (alpha >= 1.0) {
    g = HermitianOperator::zero(rho.dim());
    return true;
  }
  DivergenceSpec spec = DivergenceSpec::petz(alpha);
  QDValue qd = q_alpha_z(rho, sigma, spec);
  if (!qd.Q.finite() || !(qd.Q.value > 0.0)) return false;
  g = xi_alpha_z(rho, sigma, spec) * (-(1.0 - alpha) / qd.Q.value);
  return true;
}

class SaddleSolver {
 public:
  SaddleSolver(const DensityState& rho, const std::vector<HermitianOperator>& extremes, const SaddleOptions& opts)
      : rho_(rho), ext_(extremes), opts_(opts) {
    require(!ext_.empty(), ErrorCode::InvalidArgument, "empty set");
    require(ext_.front().dim() == rho.dim(), ErrorCode::ShapeMismatch, "set and state dimensions differ");
    std::vector<double> w(ext_.size(), 1.0 / ext_.size());
    require(support_contains(mix(ext_, w), rho.op()), ErrorCode::NoSupportElement,
            "no element of the set has support containing supp(rho)");
  }

  // min over the hull of phi(alpha, .), with its minimizer weights
  double inner_phi(double alpha, std::vector<double>* weights) {
    const int k = static_cast<int>(ext_.size());
    if (alpha <= 0.0 || alpha >= 1.0) {
      HermitianOperator p = support_projector(rho_.op());
      int best = 0;
      double bv = -kInf;
      for (int i = 0; i < k; ++i) {
        double v = alpha <= 0.0 ? trace_product(p, ext_[i]) : trace_product(rho_.op(), support_projector(ext_[i]));
        if (v > bv + 1e-15) {
          bv = v;
          best = i;
        }
      }
      if (alpha >= 1.0) {
        // some mixture contains supp(rho); the barycenter does
        if (weights) weights->assign(k, 1.0 / k);
        return 0.0;
      }
      if (weights) {
        weights->assign(k, 0.0);
        (*weights)[best] = 1.0;
      }
      return neg_log(bv);
    }
    MinimizeOptions mo = opts_.inner;
    mo.warm_start = warm_;
    MinimizationResult r = minimize_over_extremes(rho_, ext_, DivergenceSpec::petz(alpha), mo);
    warm_ = r.weights;
    if (weights) *weights = r.weights;
    return (1.0 - alpha) * r.value.value;
  }

  // sup over alpha in [0,1] of phi(alpha, sigma)
  GoldenResult sup_phi(const HermitianOperator& sigma) const {
    return golden_max([&](double a) { return chernoff_phi(rho_, sigma, a); }, 0.0, 1.0, opts_.alpha_tol);
  }

  // sup over alpha in (0,1] of psi, searched in u = log(1/alpha); x is reported as alpha
  GoldenResult sup_psi(const HermitianOperator& sigma, double r) const {
    GoldenResult g = golden_max([&](double u) { return hoeffding_psi(rho_, sigma, std::exp(-u), r); }, 0.0,
                                kMaxLogBeta, opts_.alpha_tol);
    g.x = std::exp(-g.x);
    return g;
  }

  // minimize sigma -> sup_alpha f(alpha, sigma) by pairwise FW with a Danskin gradient
  FWResult outer_min(const std::vector<double>& start, bool hoeffding, double r) {
    ConeObjective obj{[&](const HermitianOperator& s, double& value, HermitianOperator* grad) {
      GoldenResult g = hoeffding ? sup_psi(s, r) : sup_phi(s);
      if (!std::isfinite(g.fx)) return false;
      value = g.fx;
      if (grad) {
        if (!phi_gradient(rho_, s, g.x, *grad)) return false;
        if (hoeffding) *grad = *grad * (1.0 / g.x);
      }
      return true;
    }};
    MinimizeOptions mo = opts_.inner;
    mo.warm_start = start;
    mo.max_iter = std::min(mo.max_iter, 500);
    return pairwise_frank_wolfe(ext_, obj, mo);
  }

  const DensityState& rho() const { return rho_; }
  const std::vector<HermitianOperator>& extremes() const { return ext_; }
  const SaddleOptions& opts() const { return opts_; }

 private:
  DensityState rho_;
  std::vector<HermitianOperator> ext_;
  SaddleOptions opts_;
  std::vector<double> warm_;
};

SaddleReport assemble(SaddleSolver& sv, const GoldenResult& outer, const std::vector<double>& w_alpha, bool hoeffding,
                      double r) {
  SaddleReport rep;
  rep.alpha0 = outer.x;
  rep.bracket_width = outer.width;
  const double inner_val = outer.fx;
  auto f = [&](double a, const HermitianOperator& s) {
    return hoeffding ? hoeffding_psi(sv.rho(), s, a, r) : chernoff_phi(sv.rho(), s, a);
  };
  auto sup_f = [&](const HermitianOperator& s) { return hoeffding ? sv.sup_psi(s, r) : sv.sup_phi(s); };

  std::vector<double> w = w_alpha;
  HermitianOperator s = mix(sv.extremes(), w);
  GoldenResult sup = sup_f(s);
  if (sup.fx - inner_val > 1e-9) {
    // the minimizer against alpha0 is not yet a saddle; minimize the upper envelope directly
    FWResult fw = sv.outer_min(w, hoeffding, r);
    if (fw.value < sup.fx) {
      w = fw.weights;
      s = fw.sigma;
      sup = sup_f(s);
    }
  }
  rep.sigma0 = s;
  rep.weights = w;
  rep.value = f(rep.alpha0, s);
  rep.residual_alpha = std::abs(rep.value - std::max(sup.fx, rep.value));
  rep.residual_sigma = std::abs(rep.value - inner_val);
  rep.minimax_gap = std::abs(sup.fx - inner_val);
  rep.converged = rep.residual_alpha <= 1e-6 && rep.residual_sigma <= 1e-6 && rep.minimax_gap <= 1e-6;
  rep.value = inner_val;
  return rep;
}

}  // namespace

double chernoff_phi(const DensityState& rho, const HermitianOperator& sigma, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
  if (alpha <= 0.0) return neg_log(trace_product(support_projector(rho.op()), sigma));
  if (alpha >= 1.0) return neg_log(trace_product(rho.op(), support_projector(sigma)));
  HermitianOperator ra = mpow(rho.op(), alpha);
  HermitianOperator sb = mpow(sigma, 1.0 - alpha);
  return neg_log(trace_product(ra, sb));
}

double hoeffding_psi(const DensityState& rho, const HermitianOperator& sigma, double alpha, double r) {
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1]");
  double phi = chernoff_phi(rho, sigma, alpha);
  return ((alpha - 1.0) / alpha) * r + phi / alpha;
}

double min_d_zero(const DensityState& rho, const std::vector<HermitianOperator>& extremes) {
  HermitianOperator p = support_projector(rho.op());
  double best = 0.0;
  for (const auto& t : extremes) best = std::max(best, trace_product(p, t));
  return neg_log(best);
}

SaddleReport chernoff_saddle(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                             const SaddleOptions& opts) {
  SaddleSolver sv(rho, extremes, opts);
  GoldenResult outer = golden_max([&](double a) { return sv.inner_phi(a, nullptr); }, 0.0, 1.0, opts.alpha_tol);
  std::vector<double> w;
  outer.fx = sv.inner_phi(outer.x, &w);
  return assemble(sv, outer, w, false, 0.0);
}

SaddleReport chernoff_saddle(const DensityState& rho, const ConvexSetSpec& set, const SaddleOptions& opts) {
  return chernoff_saddle(rho, extreme_points(set), opts);
}

SaddleReport hoeffding_saddle(const DensityState& rho, const std::vector<HermitianOperator>& extremes, double r,
                              const SaddleOptions& opts) {
  const double d0 = min_d_zero(rho, extremes);
  if (!(r > std::max(0.0, d0)))
    fail(ErrorCode::RateOutOfWindow, "rate must exceed max{0, min D_0} = " + std::to_string(std::max(0.0, d0)));
  SaddleSolver sv(rho, extremes, opts);
  auto inner_psi = [&](double u, std::vector<double>* w) {
    const double a = std::exp(-u);
    return ((a - 1.0) / a) * r + sv.inner_phi(a, w) / a;
  };
  GoldenResult outer =
      golden_max([&](double u) { return inner_psi(u, nullptr); }, 0.0, kMaxLogBeta, opts.alpha_tol);
  std::vector<double> w;
  outer.fx = inner_psi(outer.x, &w);
  // report the bracket in alpha
  const double a_lo = std::exp(-(outer.x + outer.width)), a_hi = std::exp(-std::max(0.0, outer.x - outer.width));
  outer.x = std::exp(-outer.x);
  outer.width = a_hi - a_lo;
  return assemble(sv, outer, w, true, r);
}

SaddleReport hoeffding_saddle(const DensityState& rho, const ConvexSetSpec& set, double r,
                              const SaddleOptions& opts) {
  return hoeffding_saddle(rho, extreme_points(set), r, opts);
}

}  // namespace qadd
