#include "qadd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace qadd {

HermitianOperator mix(const std::vector<HermitianOperator>& extremes, const std::vector<double>& w) {
  Mat m = Mat::Zero(extremes.front().dim(), extremes.front().dim());
  for (size_t i = 0; i < extremes.size(); ++i)
    if (w[i] != 0.0) m += w[i] * extremes[i].matrix();
  return HermitianOperator::from_raw(m);
}

FWResult pairwise_frank_wolfe(const std::vector<HermitianOperator>& extremes, const ConeObjective& obj,
                              const MinimizeOptions& opts) {
  const int k = static_cast<int>(extremes.size());
  require(k > 0, ErrorCode::InvalidArgument, "no extreme points");
  FWResult res;
  res.weights = opts.warm_start.size() == static_cast<size_t>(k) ? opts.warm_start : std::vector<double>(k, 1.0 / k);
  res.sigma = mix(extremes, res.weights);
  HermitianOperator grad;
  if (!obj.eval(res.sigma, res.value, &grad)) {
    // a warm start may sit on a face; fall back to the barycenter
    res.weights.assign(k, 1.0 / k);
    res.sigma = mix(extremes, res.weights);
    require(obj.eval(res.sigma, res.value, &grad), ErrorCode::NoSupportElement,
            "no element of the set has support containing supp(rho)");
  }
  std::vector<double> g(k);
  int stalls = 0;
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    for (int i = 0; i < k; ++i) g[i] = trace_product(extremes[i], grad);
    int s = 0, v = -1;
    double wg = 0.0;
    for (int i = 0; i < k; ++i) {
      wg += res.weights[i] * g[i];
      if (g[i] < g[s]) s = i;
      if (res.weights[i] > 0.0 && (v < 0 || g[i] > g[v])) v = i;
    }
    res.gap = wg - g[s];
    if (res.gap <= opts.fw_gap_tol) {
      res.converged = true;
      break;
    }
    if (s == v) break;
    const double gmax = res.weights[v];
    const HermitianOperator dir = extremes[s] - extremes[v];
    auto deriv = [&](double gam) {
      std::vector<double> w = res.weights;
      w[s] += gam;
      w[v] -= gam;
      HermitianOperator sg = mix(extremes, w);
      double val = 0.0;
      HermitianOperator gr;
      if (!obj.eval(sg, val, &gr)) return 1e300;
      return trace_product(dir, gr);
    };
    const double d0 = g[s] - g[v];
    double gam = gmax;
    const double dmax = deriv(gmax);
    if (dmax > 0.0 && d0 < 0.0) {
      boost::uintmax_t it = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      auto br = boost::math::tools::toms748_solve(deriv, 0.0, gmax, d0, dmax, tol, it);
      gam = 0.5 * (br.first + br.second);
    }
    std::vector<double> w = res.weights;
    w[s] += gam;
    w[v] = (gam == gmax) ? 0.0 : w[v] - gam;
    HermitianOperator sg = mix(extremes, w);
    double val = 0.0;
    HermitianOperator gr;
    if (!obj.eval(sg, val, &gr) || val > res.value + 1e-14 * (1.0 + std::abs(res.value))) {
      if (++stalls > 20) break;
      // backtrack toward the oracle vertex until the value does not rise
      bool ok = false;
      for (int h = 0; h < 40 && !ok; ++h) {
        gam *= 0.5;
        w = res.weights;
        w[s] += gam;
        w[v] -= gam;
        sg = mix(extremes, w);
        ok = obj.eval(sg, val, &gr) && val <= res.value;
      }
      if (!ok) break;
    } else if (gam < 1e-16) {
      if (++stalls > 20) break;
    } else {
      stalls = 0;
    }
    res.weights = w;
    res.sigma = sg;
    res.value = val;
    grad = gr;
  }
  return res;
}

ConeObjective divergence_objective(const DensityState& rho, const DivergenceSpec& spec) {
  return {[rho, spec](const HermitianOperator& sigma, double& value, HermitianOperator* grad) {
    QDValue qd = q_alpha_z(rho, sigma, spec);
    if (!qd.D.finite()) return false;
    value = qd.D.value;
    if (grad) *grad = xi_alpha_z(rho, sigma, spec) * (-1.0 / qd.Q.value);
    return true;
  }};
}

ConeObjective d_down_objective(const DensityState& rho) {
  Mat V = descending_basis(rho);
  RVec r = clamped_spectrum(rho.op()).reverse();
  int rank = 0;
  while (rank < r.size() && r(rank) > 0.0) ++rank;
  return {[rho, V, r, rank](const HermitianOperator& sigma, double& value, HermitianOperator* grad) {
    ExtendedValue dv = d_down(rho, sigma);
    if (!dv.finite()) return false;
    value = dv.value;
    if (grad) {
      Mat S = V.adjoint() * sigma.matrix() * V;
      const int d = static_cast<int>(S.rows());
      Mat E = Mat::Zero(d, d);
      for (int k = 1; k <= rank; ++k) {
        double c = r(k - 1) - (k < rank ? r(k) : 0.0);
        if (c == 0.0) continue;
        E.topLeftCorner(k, k) += c * S.topLeftCorner(k, k).inverse();
      }
      *grad = HermitianOperator::from_raw(-(V * E * V.adjoint()));
    }
    return true;
  }};
}

ConeObjective d_max_objective(const DensityState& rho) {
  return {[rho](const HermitianOperator& sigma, double& value, HermitianOperator* grad) {
    if (!support_contains(sigma, rho.op())) return false;
    HermitianOperator s = mpow(sigma, -0.5);
    HermitianOperator x = HermitianOperator::from_raw(s.matrix() * rho.op().matrix() * s.matrix());
    const auto& es = x.eig();
    const int top = static_cast<int>(es.values.size()) - 1;
    value = std::log(es.values(top));
    if (grad) {
      Eigen::VectorXcd u = s.matrix() * es.vectors.col(top);
      double nrm = (u.adjoint() * sigma.matrix() * u)(0).real();
      *grad = HermitianOperator::projector(u) * (-1.0 / nrm);
    }
    return true;
  }};
}

namespace {

void check_assumption2(const DensityState& rho, const std::vector<HermitianOperator>& extremes) {
  require(!extremes.empty(), ErrorCode::InvalidArgument, "empty set");
  require(extremes.front().dim() == rho.dim(), ErrorCode::ShapeMismatch, "set and state dimensions differ");
  std::vector<double> w(extremes.size(), 1.0 / extremes.size());
  require(support_contains(mix(extremes, w), rho.op()), ErrorCode::NoSupportElement,
          "no element of the set has support containing supp(rho)");
}

MinimizationResult from_fw(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                           const FWResult& fw) {
  (void)rho;
  (void)extremes;
  MinimizationResult r;
  r.sigma_opt = fw.sigma;
  r.weights = fw.weights;
  r.value = ExtendedValue::of(fw.value);
  r.fw_gap = fw.gap;
  r.iterations = fw.iterations;
  r.converged = fw.converged;
  return r;
}

}  // namespace

MinimizationResult minimize_over_extremes(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                          const DivergenceSpec& spec, const MinimizeOptions& opts) {
  if (spec.is_max()) return minimize_d_max(rho, extremes, opts);
  require(spec.convex_in_sigma(), ErrorCode::InvalidArgument,
          "divergence " + spec.label() + " is not convex in sigma; minimization is not supported");
  check_assumption2(rho, extremes);
  FWResult fw = pairwise_frank_wolfe(extremes, divergence_objective(rho, spec), opts);
  MinimizationResult r = from_fw(rho, extremes, fw);
  r.q_value = q_alpha_z(rho, r.sigma_opt, spec).Q.value;
  r.certificate_gap = optimality_certificate(rho, r.sigma_opt, extremes, spec);
  r.converged = fw.converged && r.certificate_gap <= opts.certificate_tol * (1.0 + std::abs(r.q_value));
  return r;
}

MinimizationResult minimize_d_down(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                   const MinimizeOptions& opts) {
  check_assumption2(rho, extremes);
  FWResult fw = pairwise_frank_wolfe(extremes, d_down_objective(rho), opts);
  MinimizationResult r = from_fw(rho, extremes, fw);
  r.certificate_gap = fw.gap;
  return r;
}

MinimizationResult minimize_d_max(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                  const MinimizeOptions& opts) {
  check_assumption2(rho, extremes);
  MinimizeOptions o = opts;
  o.max_iter = std::min(o.max_iter, 2000);
  FWResult fw = pairwise_frank_wolfe(extremes, d_max_objective(rho), o);
  MinimizationResult r = from_fw(rho, extremes, fw);
  r.certificate_gap = fw.gap;
  return r;
}

namespace {

MinimizationResult minimize_product_marginal(const DensityState& rho, const ProductMarginal& pm,
                                             const DivergenceSpec& spec) {
  ConditionalResult c = conditional_entropy(rho, {{pm.dim_a, pm.dim_b}}, spec);
  MinimizationResult r;
  r.sigma_opt = kron(HermitianOperator::identity(pm.dim_a) * (1.0 / pm.dim_a), c.sigma_b);
  r.weights = {1.0};
  r.value = ExtendedValue::of(c.raw_divergence);
  r.q_value = q_alpha_z(rho, r.sigma_opt, spec).Q.value;
  r.certificate_gap = c.certificate_gap;
  r.fw_gap = c.fixpoint_residual;
  r.iterations = c.iterations;
  r.converged = c.fixpoint_residual <= 1e-10 && r.certificate_gap <= 1e-7 * (1.0 + std::abs(r.q_value));
  return r;
}

}  // namespace

MinimizationResult minimize_divergence(const DensityState& rho, const ConvexSetSpec& set, const DivergenceSpec& spec,
                                       const MinimizeOptions& opts) {
  if (auto* pm = std::get_if<ProductMarginal>(&set.variant())) return minimize_product_marginal(rho, *pm, spec);
  return minimize_over_extremes(rho, extreme_points(set), spec, opts);
}

MinimizationResult minimize_divergence(const DensityState& rho, const LiftedSet& set, const DivergenceSpec& spec,
                                       const MinimizeOptions& opts) {
  return minimize_over_extremes(rho, set.extremes, spec, opts);
}

double optimality_certificate(const DensityState& rho, const HermitianOperator& sigma0,
                              const std::vector<HermitianOperator>& extremes, const DivergenceSpec& spec) {
  HermitianOperator xi = xi_alpha_z(rho, sigma0, spec);
  double q = spec.is_umegaki() ? 1.0 : q_alpha_z(rho, sigma0, spec).Q.value;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : extremes) best = std::max(best, trace_product(t, xi));
  return best - q;
}

double optimality_certificate(const DensityState& rho, const HermitianOperator& sigma0, const ConvexSetSpec& set,
                              const DivergenceSpec& spec) {
  if (std::holds_alternative<ProductMarginal>(set.variant())) {
    HermitianOperator xi = xi_alpha_z(rho, sigma0, spec);
    double q = spec.is_umegaki() ? 1.0 : q_alpha_z(rho, sigma0, spec).Q.value;
    return support_function(set, xi).value - q;
  }
  return optimality_certificate(rho, sigma0, extreme_points(set), spec);
}

ConditionalResult conditional_entropy(const DensityState& rho_ab, const SystemShape& shape, const DivergenceSpec& spec,
                                      const FixpointOptions& opts) {
  require(shape.local_dims.size() == 2 && shape.total() == rho_ab.dim(), ErrorCode::ShapeMismatch,
          "conditional entropy needs a bipartite shape matching the state");
  require(spec.in_dp_region(), ErrorCode::InvalidArgument, "(alpha, z) must lie in the DP region");
  const int da = shape.local_dims[0];
  const HermitianOperator pi_a = HermitianOperator::identity(da) * (1.0 / da);
  ConditionalResult out;
  HermitianOperator sigma = partial_trace(rho_ab.op(), shape, {0});
  sigma = sigma * (1.0 / sigma.trace());
  if (spec.is_umegaki()) {
    out.fixpoint_residual = 0.0;
  } else {
    const double a = spec.alpha, z = spec.z();
    const HermitianOperator rp = mpow(rho_ab.op(), a / z);
    auto update = [&](const HermitianOperator& s) {
      HermitianOperator x = mpow(kron(pi_a, s), (1.0 - a) / (2.0 * z));
      HermitianOperator y = HermitianOperator::from_raw(x.matrix() * rp.matrix() * x.matrix());
      HermitianOperator u = partial_trace(mpow(y, z), shape, {0});
      return u * (1.0 / u.trace());
    };
    double res = std::numeric_limits<double>::infinity();
    for (out.iterations = 0; out.iterations < opts.max_iter; ++out.iterations) {
      HermitianOperator u = update(sigma);
      res = (u - sigma).max_abs();
      require(std::isfinite(res), ErrorCode::FixpointDiverged, "fixed-point iteration produced non-finite values");
      if (res <= opts.tol) break;
      sigma = sigma * (1.0 - opts.eta) + u * opts.eta;
    }
    out.fixpoint_residual = res;
    if (res > opts.tol && res > 1e-6) fail(ErrorCode::FixpointDiverged, "fixed-point iteration did not settle");
  }
  out.sigma_b = sigma;
  HermitianOperator full = kron(pi_a, sigma);
  ExtendedValue d = divergence(rho_ab, full, spec);
  require(d.finite(), ErrorCode::FixpointDiverged, "fixed point has infinite divergence");
  out.raw_divergence = d.value;
  out.value = d.value - std::log(static_cast<double>(da));
  out.certificate_gap =
      optimality_certificate(rho_ab, full, ConvexSetSpec::product_marginal(da, shape.local_dims[1]), spec);
  return out;
}

GoldenResult golden_max(const std::function<double(double)>& f, double a, double b, double tol, int max_eval) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  const double a0 = a;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  GoldenResult r;
  r.evaluations = 2;
  while (b - a > tol && r.evaluations < max_eval) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
    ++r.evaluations;
  }
  if (fc >= fd) {
    r.x = c;
    r.fx = fc;
  } else {
    r.x = d;
    r.fx = fd;
  }
  r.width = b - a;
  double fa = f(a0);
  ++r.evaluations;
  if (fa >= r.fx - 1e-12 * (1.0 + std::abs(r.fx))) {
    r.x = a0;
    r.fx = std::max(fa, r.fx);
  }
  return r;
}

}  // namespace qadd
