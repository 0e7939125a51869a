#include "qadd/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qadd {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool within_cap(int dim, int n, long cap) {
  double size = std::pow(static_cast<double>(dim), n);
  return size <= static_cast<double>(cap);
}

struct ProfilePoint {
  double alpha;
  double m;  // scaled min of the sandwiched divergence
  std::vector<double> weights;
};

// m(alpha) on a geometric grid of alpha - 1 in [1e-3, alpha_max - 1]
std::vector<ProfilePoint> sandwiched_profile(const DensityState& rho, const std::vector<HermitianOperator>& ex,
                                             double scale, const ExponentOptions& opts) {
  std::vector<ProfilePoint> out;
  const int n = std::max(2, opts.alpha_grid);
  const double lo = std::log(1e-3), hi = std::log(opts.alpha_max - 1.0);
  MinimizeOptions mo = opts.certify.minimize;
  for (int i = 0; i < n; ++i) {
    const double a = 1.0 + std::exp(lo + (hi - lo) * i / (n - 1));
    MinimizationResult r = minimize_over_extremes(rho, ex, DivergenceSpec::sandwiched(a), mo);
    mo.warm_start = r.weights;
    out.push_back({a, scale * r.value.value, r.weights});
  }
  return out;
}

double sc_objective(double a, double r, double m) { return ((a - 1.0) / a) * (r - m); }

AntiDivergence anti_from_profile(const DensityState& rho, const std::vector<HermitianOperator>& ex, double r,
                                 double scale, const std::vector<ProfilePoint>& prof, const ExponentOptions& opts) {
  AntiDivergence best;
  best.value = -kInf;
  int bi = 0;
  for (size_t i = 0; i < prof.size(); ++i) {
    double v = sc_objective(prof[i].alpha, r, prof[i].m);
    if (v > best.value) {
      best = {v, prof[i].alpha, prof[i].weights};
      bi = static_cast<int>(i);
    }
  }
  // polish between the neighbouring grid points
  const double a_lo = bi > 0 ? prof[bi - 1].alpha : 1.0 + 1e-6;
  const double a_hi = bi + 1 < static_cast<int>(prof.size()) ? prof[bi + 1].alpha : opts.alpha_max;
  MinimizeOptions mo = opts.certify.minimize;
  mo.warm_start = best.weights;
  GoldenResult g = golden_max(
      [&](double a) {
        MinimizationResult m = minimize_over_extremes(rho, ex, DivergenceSpec::sandwiched(a), mo);
        return sc_objective(a, r, scale * m.value.value);
      },
      a_lo, a_hi, 1e-8 * a_hi, 120);
  if (g.fx > best.value) {
    MinimizationResult m = minimize_over_extremes(rho, ex, DivergenceSpec::sandwiched(g.x), mo);
    best = {sc_objective(g.x, r, scale * m.value.value), g.x, m.weights};
  }
  MinimizationResult mx = minimize_d_max(rho, ex, opts.certify.minimize);
  const double v_inf = r - scale * mx.value.value;
  if (v_inf > best.value) best = {v_inf, kInf, mx.weights};
  return best;
}

std::vector<HermitianOperator> measured(const std::vector<HermitianOperator>& ops, const Mat& basis) {
  std::vector<HermitianOperator> out;
  for (const auto& o : ops) {
    Mat m = basis.adjoint() * o.matrix() * basis;
    std::vector<double> d(m.rows());
    for (int i = 0; i < m.rows(); ++i) d[i] = std::max(0.0, m(i, i).real());
    out.push_back(HermitianOperator::diagonal(d));
  }
  return out;
}

struct SteinData {
  MinimizationResult m1;
  double upper = 0.0;
  double lower = 0.0;
  std::vector<int> n_used;
  std::vector<double> upper_by_n;
  AdditivityCertificate cert;
};

SteinData stein_data(const DensityState& rho, const ConvexSetSpec& set, const std::vector<HermitianOperator>& ex,
                     const ExponentOptions& opts) {
  SteinData s;
  const DivergenceSpec um = DivergenceSpec::umegaki();
  s.m1 = minimize_over_extremes(rho, ex, um, opts.certify.minimize);
  double running = s.m1.value.value;
  s.n_used.push_back(1);
  s.upper_by_n.push_back(running);
  for (int n = 2; n <= opts.n_max; ++n) {
    if (!within_cap(rho.dim(), n, opts.size_cap)) break;
    LiftedSet ls = lift(set, n, opts.size_cap);
    DensityState rn(tensor_power(rho.op(), n, opts.size_cap));
    MinimizationResult mn = minimize_over_extremes(rn, ls.extremes, um, opts.certify.minimize);
    running = std::min(running, mn.value.value / n);
    s.n_used.push_back(n);
    s.upper_by_n.push_back(running);
  }
  s.upper = running;
  s.lower = minimize_d_down(rho, ex, opts.certify.minimize).value.value;
  s.cert = additivity_check_at(rho, s.m1.sigma_opt, ex, um, opts.certify);
  s.cert.weights = s.m1.weights;
  s.cert.optimizer_gap = s.m1.certificate_gap;
  return s;
}

bool stein_certified(const SteinData& s, const ExponentOptions& opts) {
  return s.cert.verdict == Verdict::Additive &&
         s.m1.certificate_gap <= opts.certify.certificate_tol * (1.0 + std::abs(s.m1.q_value));
}

}  // namespace

const char* to_string(ExponentKind k) {
  switch (k) {
    case ExponentKind::Stein: return "stein";
    case ExponentKind::Chernoff: return "chernoff";
    case ExponentKind::Hoeffding: return "hoeffding";
    case ExponentKind::StrongConverse: return "sc";
  }
  return "?";
}

ExponentReport stein_report(const DensityState& rho, const ConvexSetSpec& set, const ExponentOptions& opts) {
  auto ex = extreme_points(set);
  SteinData s = stein_data(rho, set, ex, opts);
  ExponentReport rep;
  rep.kind = ExponentKind::Stein;
  rep.lower = s.lower;
  rep.upper = s.upper;
  rep.n_used = s.n_used;
  rep.upper_by_n = s.upper_by_n;
  rep.sigma0_weights = s.m1.weights;
  rep.certificate = s.cert;
  if (stein_certified(s, opts)) {
    rep.value = s.m1.value.value;
    rep.certified = true;
  }
  return rep;
}

ExponentReport chernoff_report(const DensityState& rho, const ConvexSetSpec& set, const ExponentOptions& opts) {
  auto ex = extreme_points(set);
  ExponentReport rep;
  rep.kind = ExponentKind::Chernoff;
  SaddleReport sd = chernoff_saddle(rho, ex, opts.saddle);
  rep.saddle = sd;
  rep.alpha0 = sd.alpha0;
  rep.sigma0_weights = sd.weights;
  rep.upper = sd.value;
  rep.n_used = {1};
  rep.upper_by_n = {sd.value};
  if (within_cap(rho.dim(), 2, opts.size_cap)) {
    LiftedSet ls = lift(set, 2, opts.size_cap);
    DensityState r2(tensor_power(rho.op(), 2, opts.size_cap));
    SaddleReport s2 = chernoff_saddle(r2, ls.extremes, opts.saddle);
    rep.upper = std::min(rep.upper, s2.value / 2.0);
    rep.n_used.push_back(2);
    rep.upper_by_n.push_back(rep.upper);
  }
  if (sd.alpha0 <= 1e-9) {
    rep.certified = true;
    rep.notes.push_back("alpha0 = 0");
  } else if (sd.alpha0 < 1.0) {
    AdditivityCertificate c = additivity_check_at(rho, sd.sigma0, ex, DivergenceSpec::petz(sd.alpha0), opts.certify);
    c.weights = sd.weights;
    rep.certified = c.verdict == Verdict::Additive;
    rep.certificate = c;
  }
  if (!sd.converged) {
    rep.certified = false;
    rep.notes.push_back("saddle residuals above 1e-6");
  }
  if (rep.certified) {
    rep.value = sd.value;
    rep.lower = sd.value;
  }
  return rep;
}

ExponentReport hoeffding_report(const DensityState& rho, const ConvexSetSpec& set, double r,
                                const ExponentOptions& opts) {
  auto ex = extreme_points(set);
  ExponentReport rep;
  rep.kind = ExponentKind::Hoeffding;
  rep.rate = r;
  const double d0 = min_d_zero(rho, ex);
  if (!(r > std::max(0.0, d0)))
    fail(ErrorCode::RateOutOfWindow, "rate must exceed max{0, min D_0} = " + std::to_string(std::max(0.0, d0)));
  SteinData s = stein_data(rho, set, ex, opts);
  if (stein_certified(s, opts)) {
    if (!(r < s.m1.value.value))
      fail(ErrorCode::RateOutOfWindow, "rate must lie below the Stein exponent " + std::to_string(s.m1.value.value));
  } else {
    if (!(r < s.upper))
      fail(ErrorCode::RateOutOfWindow, "rate must lie below the Stein upper bound " + std::to_string(s.upper));
    if (r >= s.lower) {
      rep.window_approximate = true;
      rep.notes.push_back("Stein exponent known only within bounds; rate window approximate");
    }
  }
  SaddleReport sd = hoeffding_saddle(rho, ex, r, opts.saddle);
  rep.saddle = sd;
  rep.alpha0 = sd.alpha0;
  rep.sigma0_weights = sd.weights;
  rep.upper = sd.value;
  rep.n_used = {1};
  rep.upper_by_n = {sd.value};
  if (within_cap(rho.dim(), 2, opts.size_cap)) {
    LiftedSet ls = lift(set, 2, opts.size_cap);
    DensityState r2(tensor_power(rho.op(), 2, opts.size_cap));
    SaddleReport s2 = hoeffding_saddle(r2, ls.extremes, 2.0 * r, opts.saddle);
    rep.upper = std::min(rep.upper, s2.value / 2.0);
    rep.n_used.push_back(2);
    rep.upper_by_n.push_back(rep.upper);
  }
  if (sd.alpha0 < 1.0 - 1e-9) {
    AdditivityCertificate c = additivity_check_at(rho, sd.sigma0, ex, DivergenceSpec::petz(sd.alpha0), opts.certify);
    c.weights = sd.weights;
    rep.certified = c.verdict == Verdict::Additive && sd.converged;
    rep.certificate = c;
  } else {
    rep.notes.push_back("alpha0 = 1: the rate reaches the single-letter relative entropy");
  }
  if (rep.certified) {
    rep.value = sd.value;
    rep.lower = sd.value;
  }
  return rep;
}

AntiDivergence hoeffding_anti_divergence(const DensityState& rho, const std::vector<HermitianOperator>& extremes,
                                         double r, double scale, const ExponentOptions& opts) {
  auto prof = sandwiched_profile(rho, extremes, scale, opts);
  return anti_from_profile(rho, extremes, r, scale, prof, opts);
}

ExponentReport strong_converse_report(const DensityState& rho, const ConvexSetSpec& set, double r,
                                      const ExponentOptions& opts) {
  require(r > 0.0, ErrorCode::InvalidArgument, "rate must be positive");
  auto ex = extreme_points(set);
  ExponentReport rep;
  rep.kind = ExponentKind::StrongConverse;
  rep.rate = r;

  auto prof = sandwiched_profile(rho, ex, 1.0, opts);
  AntiDivergence a1 = anti_from_profile(rho, ex, r, 1.0, prof, opts);
  double lower = a1.value;
  rep.n_used = {1};
  if (within_cap(rho.dim(), 2, opts.size_cap)) {
    LiftedSet ls = lift(set, 2, opts.size_cap);
    DensityState r2(tensor_power(rho.op(), 2, opts.size_cap));
    AntiDivergence a2 = hoeffding_anti_divergence(r2, ls.extremes, r, 0.5, opts);
    lower = std::max(lower, a2.value);
    rep.n_used.push_back(2);
  }
  rep.lower = std::max(0.0, lower);
  rep.alpha0 = a1.alpha0;
  rep.sigma0_weights = a1.weights;
  const HermitianOperator sigma0 = mix(ex, a1.weights);

  MinimizationResult um = minimize_over_extremes(rho, ex, DivergenceSpec::umegaki(), opts.certify.minimize);
  MinimizationResult mx = minimize_d_max(rho, ex, opts.certify.minimize);
  const double dmin = um.value.value, dmax = mx.value.value;
  double r_inf = dmax;
  for (const auto& p : prof) r_inf = std::max(r_inf, p.alpha * dmax - (p.alpha - 1.0) * p.m);
  rep.d_min = dmin;
  rep.dmax_min = dmax;
  rep.r_inf = r_inf;

  // pinched-measurement upper bound over candidate bases
  std::vector<Mat> bases;
  for (const auto& t : ex) bases.push_back(t.eig().vectors);
  bases.push_back(rho.op().eig().vectors);
  bases.push_back(sigma0.eig().vectors);
  bases.push_back(um.sigma_opt.eig().vectors);
  double upper = kInf;
  for (const Mat& b : bases) {
    DensityState rm(measured({rho.op()}, b).front());
    AntiDivergence am = hoeffding_anti_divergence(rm, measured(ex, b), r, 1.0, opts);
    upper = std::min(upper, std::max(0.0, am.value));
  }
  rep.upper = upper;

  if (r <= dmin) {
    AdditivityCertificate c = additivity_check_at(rho, um.sigma_opt, ex, DivergenceSpec::umegaki(), opts.certify);
    if (c.verdict == Verdict::Additive) {
      rep.certified = true;
      rep.notes.push_back("rate below the single-letter Stein exponent");
    }
    rep.certificate = c;
  } else {
    const bool commuting = commutes(rho.op(), sigma0, 1e-8);
    const bool in_window = r < r_inf && std::isfinite(a1.alpha0);
    if (commuting && (in_window || ex.size() == 1)) {
      rep.certified = true;
      rep.notes.push_back("rho commutes with the optimizer");
    } else if (in_window && dmin < dmax) {
      const double a0 = a1.alpha0;
      AdditivityCertificate c = additivity_check_at(rho, sigma0, ex, DivergenceSpec::sandwiched(a0), opts.certify);
      c.weights = a1.weights;
      rep.certificate = c;
      const double h = 1e-4 * a0;
      auto logq = [&](double a) {
        return (a - 1.0) * divergence(rho, sigma0, DivergenceSpec::sandwiched(a)).value;
      };
      const double gamma = (logq(a0 + h) - logq(a0 - h)) / (2.0 * h);
      const double dmax0 = d_max(rho, sigma0).value;
      const bool cond1 = a0 <= 2.0 && r < dmax;
      const bool cond2 = a0 <= 2.0 && gamma < dmax0;
      rep.certified = c.verdict == Verdict::Additive && (cond1 || cond2);
      if (rep.certified) rep.notes.push_back(cond1 ? "condition 1" : "condition 2");
    } else if (!in_window) {
      rep.notes.push_back("rate outside (D, r_inf)");
    }
  }
  if (rep.certified) {
    rep.value = rep.lower;
    rep.upper = std::max(rep.upper, rep.lower);
  }
  return rep;
}

namespace {

// Gauss-Legendre 64 on [lo, hi] for a matrix-valued integrand
template <class F>
Mat gl64(const F& f, double lo, double hi) {
  using Q = boost::math::quadrature::gauss<double, 64>;
  const auto& x = Q::abscissa();
  const auto& w = Q::weights();
  const double c = (hi + lo) / 2.0, h = (hi - lo) / 2.0;
  // even order: only the positive nodes are stored, none at the center
  Mat s = (f(c + h * x[0]) + f(c - h * x[0])) * w[0];
  for (size_t i = 1; i < x.size(); ++i) s += (f(c + h * x[i]) + f(c - h * x[i])) * w[i];
  return s * h;
}

template <class F>
Mat adaptive_gl(const F& f, double lo, double hi, const Mat& whole, double tol, int depth) {
  const double mid = (lo + hi) / 2.0;
  Mat l = gl64(f, lo, mid), r = gl64(f, mid, hi);
  Mat both = l + r;
  if (depth >= 12 || (both - whole).cwiseAbs().maxCoeff() <= tol) return both;
  return adaptive_gl(f, lo, mid, l, tol / 2.0, depth + 1) + adaptive_gl(f, mid, hi, r, tol / 2.0, depth + 1);
}

}  // namespace

TestOperator audenaert_test(const HermitianOperator& a, const HermitianOperator& b, double alpha, int n_copies) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  require(a.dim() == b.dim(), ErrorCode::ShapeMismatch, "A and B dimensions differ");
  require(is_psd(a) && is_psd(b), ErrorCode::InvalidArgument, "A and B must be positive semidefinite");
  // work on supp(A + B)
  HermitianOperator sum = a + b;
  RVec ev = clamped_spectrum(sum);
  const Mat& U = sum.eig().vectors;
  std::vector<int> keep;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) keep.push_back(i);
  Mat V(a.dim(), static_cast<int>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) V.col(i) = U.col(keep[i]);
  const HermitianOperator ar = HermitianOperator::from_raw(V.adjoint() * a.matrix() * V);
  const HermitianOperator br = HermitianOperator::from_raw(V.adjoint() * b.matrix() * V);
  const HermitianOperator aa = mpow(ar, alpha);
  const ScalarFn f = ScalarFn::power(1.0 - alpha);
  const bool sing_a = support_rank(ar) < ar.dim(), sing_b = support_rank(br) < br.dim();
  // t = u^q removes the integrable endpoint singularity when B (t = 0) or A (t = 1) is singular
  const double q = std::ceil(3.0 / (1.0 - alpha));
  auto dk = [&](double t) -> Mat {
    // Daleckii-Krein form on the exact spectrum of C_t (it is positive definite inside (0,1))
    Eigen::SelfAdjointEigenSolver<Mat> es(t * ar.matrix() + (1.0 - t) * br.matrix());
    const RVec& c = es.eigenvalues();
    const Mat& u = es.eigenvectors();
    Mat hb = u.adjoint() * aa.matrix() * u;
    for (int j = 0; j < hb.rows(); ++j)
      for (int k = 0; k < hb.cols(); ++k)
        hb(j, k) *= (c(j) > 0.0 && c(k) > 0.0) ? f.divided(c(j), c(k)) : 0.0;
    return u * hb * u.adjoint();
  };
  auto piece = [&](double lo, double hi, int mode) {
    // mode 0: plain; 1: graded toward lo; 2: graded toward hi
    auto g = [&](double u) -> Mat {
      if (mode == 0) return dk(u);
      const double s = hi - lo;
      const double du = q * std::pow(u, q - 1.0) * s;
      return mode == 1 ? Mat(dk(lo + s * std::pow(u, q)) * du) : Mat(dk(hi - s * std::pow(u, q)) * du);
    };
    const double a0 = mode == 0 ? lo : 0.0, a1 = mode == 0 ? hi : 1.0;
    Mat whole = gl64(g, a0, a1);
    return adaptive_gl(g, a0, a1, whole, 1e-12, 0);
  };
  Mat t;
  if (!sing_a && !sing_b) t = piece(0.0, 1.0, 0);
  else t = piece(0.0, 0.5, sing_b ? 1 : 0) + piece(0.5, 1.0, sing_a ? 2 : 0);
  Mat full = V * t * V.adjoint();
  TestOperator out{HermitianOperator::from_raw(full), n_copies};
  require((full.array().isFinite()).all(), ErrorCode::QuadratureNonConvergent, "test operator quadrature failed");
  return out;
}

HermitianOperator audenaert_test_double_quadrature(const HermitianOperator& a, const HermitianOperator& b,
                                                   double alpha, int nt, int nmu) {
  (void)nmu;
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  const double s = 1.0 - alpha;
  const HermitianOperator aa = mpow(a, alpha);
  std::vector<double> x(nt), w(nt);
  {
    // Gauss-Legendre nodes on [0,1] from the 64-point rule, repeated over nt/64 panels
    using Q = boost::math::quadrature::gauss<double, 64>;
    const int panels = std::max(1, nt / 64);
    x.clear();
    w.clear();
    for (int p = 0; p < panels; ++p) {
      const double lo = static_cast<double>(p) / panels, hi = static_cast<double>(p + 1) / panels;
      const double c = (lo + hi) / 2.0, h = (hi - lo) / 2.0;
      for (size_t i = 0; i < Q::abscissa().size(); ++i) {
        for (int sgn : {1, -1}) {
          x.push_back(c + sgn * h * Q::abscissa()[i]);
          w.push_back(h * Q::weights()[i]);
        }
      }
    }
  }
  const int d = a.dim();
  Mat total = Mat::Zero(d, d);
  for (size_t k = 0; k < x.size(); ++k) {
    HermitianOperator c = HermitianOperator::from_raw(x[k] * a.matrix() + (1.0 - x[k]) * b.matrix());
    const auto& es = c.eig();
    Mat ab = es.vectors.adjoint() * aa.matrix() * es.vectors;
    Mat m = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j)
      for (int l = j; l < d; ++l) {
        const double cj = std::max(0.0, es.values(j)), cl = std::max(0.0, es.values(l));
        // lambda = e^x: the integrand decays exponentially in both directions
        auto g = [&](double x) {
          if (x > 0.0) {
            const double e = std::exp(-x);
            return std::exp((s - 1.0) * x) / ((1.0 + cj * e) * (1.0 + cl * e));
          }
          const double lam = std::exp(x);
          return std::exp((s + 1.0) * x) / ((lam + cj) * (lam + cl));
        };
        double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -kInf, kInf, 15, 1e-13);
        v *= std::sin(s * kPi) / kPi;
        m(j, l) = v * ab(j, l);
        m(l, j) = v * ab(l, j);
      }
    total += w[k] * (es.vectors * m * es.vectors.adjoint());
  }
  return HermitianOperator::from_raw(total);
}

double max_alpha_trace(const DensityState& rho, const ConvexSetSpec& set, double alpha, int n) {
  LiftedSet ls = lift(set, n);
  DensityState rn(tensor_power(rho.op(), n));
  MinimizationResult m = minimize_over_extremes(rn, ls.extremes, DivergenceSpec::petz(alpha));
  return m.q_value;
}

TestOperator audenaert_test_for_set(const DensityState& rho, const ConvexSetSpec& set, double alpha, int n) {
  LiftedSet ls = lift(set, n);
  DensityState rn(tensor_power(rho.op(), n));
  MinimizationResult m = minimize_over_extremes(rn, ls.extremes, DivergenceSpec::petz(alpha));
  return audenaert_test(rn.op(), m.sigma_opt, alpha, n);
}

TestErrors evaluate_test(const TestOperator& t, const DensityState& rho, const ConvexSetSpec& set) {
  require(t.n_copies >= 1, ErrorCode::InvalidArgument, "test needs n >= 1");
  LiftedSet ls = lift(set, t.n_copies);
  require(ls.dim == t.op.dim(), ErrorCode::ShapeMismatch, "test dimension does not match the lifted set");
  HermitianOperator rn = tensor_power(rho.op(), t.n_copies);
  require(rn.dim() == t.op.dim(), ErrorCode::ShapeMismatch, "test dimension does not match the state");
  TestErrors e;
  e.type1 = 1.0 - trace_product(t.op, rn);
  e.type2 = support_function(ls, t.op).value;
  return e;
}

}  // namespace qadd
