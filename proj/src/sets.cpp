#include "qadd/sets.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qadd {

ConvexSetSpec::ConvexSetSpec(SetVariant v) : v_(std::move(v)) {
  if (auto* h = std::get_if<FiniteHull>(&v_)) {
    require(!h->extremes.empty(), ErrorCode::ValidationError, "hull needs at least one extreme point");
    const int d = h->extremes.front().dim();
    std::vector<HermitianOperator> uniq;
    for (const auto& e : h->extremes) {
      require(e.dim() == d, ErrorCode::ShapeMismatch, "hull extremes have different dimensions");
      require(is_psd(e), ErrorCode::ValidationError, "hull extreme is not positive semidefinite");
      bool dup = false;
      for (const auto& u : uniq) dup |= (u.matrix() - e.matrix()).cwiseAbs().maxCoeff() <= 1e-12;
      if (!dup) uniq.push_back(e);
    }
    h->extremes = std::move(uniq);
  } else if (auto* a = std::get_if<AVQubit>(&v_)) {
    require(a->lambda >= 0.0 && a->lambda < 1.0, ErrorCode::ValidationError, "av_qubit lambda must lie in [0,1)");
  } else if (auto* w = std::get_if<WernerRainsSlice>(&v_)) {
    require(w->d >= 2 && w->d <= 8, ErrorCode::ValidationError, "werner_rains d must lie in [2,8]");
  } else if (auto* s = std::get_if<SingleState>(&v_)) {
    require(is_psd(s->sigma), ErrorCode::ValidationError, "single state is not positive semidefinite");
  } else if (auto* p = std::get_if<ProductMarginal>(&v_)) {
    require(p->dim_a >= 1 && p->dim_b >= 1, ErrorCode::ValidationError, "product marginal dims must be positive");
  }
}

ConvexSetSpec ConvexSetSpec::hull(std::vector<HermitianOperator> extremes) {
  return ConvexSetSpec(FiniteHull{std::move(extremes)});
}

int ConvexSetSpec::base_dim() const {
  struct V {
    int operator()(const FiniteHull& h) const { return h.extremes.front().dim(); }
    int operator()(const AVQubit&) const { return 2; }
    int operator()(const WernerRainsSlice& w) const { return w.d * w.d; }
    int operator()(const ManaStrangeSlice&) const { return 3; }
    int operator()(const SingleState& s) const { return s.sigma.dim(); }
    int operator()(const ProductMarginal& p) const { return p.dim_a * p.dim_b; }
  };
  return std::visit(V{}, v_);
}

bool ConvexSetSpec::finitely_generated() const { return !std::holds_alternative<ProductMarginal>(v_); }

std::string ConvexSetSpec::type_name() const {
  static const char* names[] = {"hull", "av_qubit", "werner_rains", "mana_strange", "single", "product_marginal"};
  return names[v_.index()];
}

Eigen::VectorXcd plus_ket() {
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  return v / std::sqrt(2.0);
}

Eigen::VectorXcd minus_ket() {
  Eigen::VectorXcd v(2);
  v << 1.0, -1.0;
  return v / std::sqrt(2.0);
}

DensityState plus_state() { return DensityState(HermitianOperator::projector(plus_ket())); }

namespace {

HermitianOperator swap_op(int d) {
  Mat f = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  return HermitianOperator::from_raw(f);
}

struct Piece {
  double alpha, beta;
  double mult;
};

// vertices of {(a,b) >= 0 : sum_u m_u |alpha_u a + beta_u b| <= 1}
std::vector<SliceVertex> slice_polygon(std::vector<Piece> raw) {
  std::vector<Piece> pieces;
  for (const auto& p : raw) {
    bool merged = false;
    for (auto& q : pieces)
      if (std::abs(q.alpha - p.alpha) <= 1e-12 && std::abs(q.beta - p.beta) <= 1e-12) {
        q.mult += p.mult;
        merged = true;
      }
    if (!merged) pieces.push_back(p);
  }
  struct Line {
    double c1, c2, r;
  };
  std::vector<Line> lines{{-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}};
  const int m = static_cast<int>(pieces.size());
  for (int s = 0; s < (1 << m); ++s) {
    Line l{0.0, 0.0, 1.0};
    for (int u = 0; u < m; ++u) {
      double sg = (s >> u & 1) ? -1.0 : 1.0;
      l.c1 += sg * pieces[u].mult * pieces[u].alpha;
      l.c2 += sg * pieces[u].mult * pieces[u].beta;
    }
    lines.push_back(l);
  }
  auto feasible = [&](double a, double b) {
    for (const auto& l : lines)
      if (l.c1 * a + l.c2 * b > l.r + 1e-10) return false;
    return true;
  };
  std::vector<SliceVertex> out;
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      double det = lines[i].c1 * lines[j].c2 - lines[i].c2 * lines[j].c1;
      if (std::abs(det) < 1e-14) continue;
      double a = (lines[i].r * lines[j].c2 - lines[i].c2 * lines[j].r) / det;
      double b = (lines[i].c1 * lines[j].r - lines[i].r * lines[j].c1) / det;
      if (!feasible(a, b)) continue;
      if (std::abs(a) < 1e-12 && std::abs(b) < 1e-12) continue;  // the origin is dominated
      a = std::max(a, 0.0);
      b = std::max(b, 0.0);
      bool dup = false;
      for (const auto& v : out) dup |= std::abs(v.a - a) < 1e-10 && std::abs(v.b - b) < 1e-10;
      if (!dup) out.push_back({a, b});
    }
  std::sort(out.begin(), out.end(),
            [](const SliceVertex& x, const SliceVertex& y) { return std::atan2(x.b, x.a) < std::atan2(y.b, y.a); });
  return out;
}

}  // namespace

HermitianOperator sym_state(int d) {
  HermitianOperator f = swap_op(d);
  HermitianOperator p = (HermitianOperator::identity(d * d) + f) * 0.5;
  return p * (2.0 / (d * (d + 1.0)));
}

HermitianOperator asym_state(int d) {
  HermitianOperator f = swap_op(d);
  HermitianOperator p = (HermitianOperator::identity(d * d) - f) * 0.5;
  return p * (2.0 / (d * (d - 1.0)));
}

DensityState werner_state(double p, int d) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::ValidationError, "werner p must lie in [0,1]");
  return DensityState(sym_state(d) * p + asym_state(d) * (1.0 - p));
}

HermitianOperator strange_projector() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return HermitianOperator::projector(v);
}

DensityState strange_state(double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::ValidationError, "strange p must lie in [0,1]");
  return DensityState(strange_projector() * p + HermitianOperator::identity(3) * ((1.0 - p) / 3.0));
}

HermitianOperator strange_twirl(const HermitianOperator& s) {
  HermitianOperator S = strange_projector();
  HermitianOperator N = HermitianOperator::identity(3) - S;
  return S * trace_product(S, s) + N * (trace_product(N, s) / 2.0);
}

std::vector<double> qutrit_wigner(const HermitianOperator& s) {
  require(s.dim() == 3, ErrorCode::ShapeMismatch, "qutrit Wigner function needs dimension 3");
  const cplx w = std::polar(1.0, 2.0 * M_PI / 3.0);
  Mat X = Mat::Zero(3, 3), Z = Mat::Zero(3, 3), A0 = Mat::Zero(3, 3);
  for (int j = 0; j < 3; ++j) {
    X((j + 1) % 3, j) = 1.0;
    Z(j, j) = std::pow(w, j);
    A0((3 - j) % 3, j) = 1.0;
  }
  std::vector<double> out;
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p) {
      Mat T = Mat::Identity(3, 3);
      for (int i = 0; i < p; ++i) T = T * Z;
      for (int i = 0; i < q; ++i) T = T * X;
      Mat A = T * A0 * T.adjoint();
      out.push_back((A * s.matrix()).trace().real() / 3.0);
    }
  return out;
}

double wigner_norm(const HermitianOperator& s) {
  double n = 0.0;
  for (double x : qutrit_wigner(s)) n += std::abs(x);
  return n;
}

std::vector<SliceVertex> werner_slice_vertices(int d) {
  HermitianOperator x = partial_transpose(sym_state(d), {{d, d}}, 1);
  HermitianOperator y = partial_transpose(asym_state(d), {{d, d}}, 1);
  // both transposes lie in span{I, max-entangled projector}; a generic combination fixes the common basis
  HermitianOperator mix = x + y * std::sqrt(2.0);
  const Mat& U = mix.eig().vectors;
  std::vector<Piece> pieces;
  for (int i = 0; i < U.cols(); ++i) {
    double a = (U.col(i).adjoint() * x.matrix() * U.col(i))(0).real();
    double b = (U.col(i).adjoint() * y.matrix() * U.col(i))(0).real();
    pieces.push_back({a, b, 1.0});
  }
  return slice_polygon(pieces);
}

std::vector<SliceVertex> mana_slice_vertices() {
  HermitianOperator S = strange_projector();
  HermitianOperator N = (HermitianOperator::identity(3) - S) * 0.5;
  auto ws = qutrit_wigner(S), wn = qutrit_wigner(N);
  std::vector<Piece> pieces;
  for (size_t u = 0; u < ws.size(); ++u) pieces.push_back({ws[u], wn[u], 1.0});
  return slice_polygon(pieces);
}

namespace {

struct ExtremesVisitor {
  std::vector<HermitianOperator> operator()(const FiniteHull& h) const { return h.extremes; }
  std::vector<HermitianOperator> operator()(const AVQubit& a) const {
    return {HermitianOperator::diagonal({(1.0 + a.lambda) / 2.0, (1.0 - a.lambda) / 2.0}),
            HermitianOperator::projector(minus_ket())};
  }
  std::vector<HermitianOperator> operator()(const WernerRainsSlice& w) const {
    std::vector<HermitianOperator> out;
    HermitianOperator x = sym_state(w.d), y = asym_state(w.d);
    for (const auto& v : werner_slice_vertices(w.d)) out.push_back(x * v.a + y * v.b);
    return out;
  }
  std::vector<HermitianOperator> operator()(const ManaStrangeSlice&) const {
    std::vector<HermitianOperator> out;
    HermitianOperator S = strange_projector();
    HermitianOperator N = (HermitianOperator::identity(3) - S) * 0.5;
    for (const auto& v : mana_slice_vertices()) out.push_back(S * v.a + N * v.b);
    return out;
  }
  std::vector<HermitianOperator> operator()(const SingleState& s) const { return {s.sigma}; }
  std::vector<HermitianOperator> operator()(const ProductMarginal&) const {
    fail(ErrorCode::NotFinitelyGenerated, "product marginal set has no finite extreme list");
  }
};

}  // namespace

std::vector<HermitianOperator> extreme_points(const ConvexSetSpec& set) {
  return std::visit(ExtremesVisitor{}, set.variant());
}

SupportValue support_function(const ConvexSetSpec& set, const HermitianOperator& x) {
  require(x.dim() == set.base_dim(), ErrorCode::ShapeMismatch, "support function argument has wrong dimension");
  if (auto* p = std::get_if<ProductMarginal>(&set.variant())) {
    HermitianOperator xb = partial_trace(x, {{p->dim_a, p->dim_b}}, {0});
    return {xb.eig().values.maxCoeff() / p->dim_a, 0};
  }
  auto ex = extreme_points(set);
  SupportValue best{-std::numeric_limits<double>::infinity(), 0};
  for (size_t i = 0; i < ex.size(); ++i) {
    double v = trace_product(ex[i], x);
    if (i == 0 || v > best.value + 1e-15 * std::max(1.0, std::abs(best.value))) best = {v, static_cast<long>(i)};
  }
  return best;
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

HermitianOperator product_extreme(const std::vector<HermitianOperator>& base, const std::vector<int>& idx) {
  HermitianOperator out = base.at(idx.front());
  for (size_t i = 1; i < idx.size(); ++i) out = kron(out, base.at(idx[i]));
  return out;
}

LiftedSet lift(const ConvexSetSpec& set, int n, long size_cap) {
  require(n >= 1, ErrorCode::InvalidArgument, "lift needs n >= 1");
  require(set.finitely_generated(), ErrorCode::NotFinitelyGenerated, "only finitely generated sets can be lifted");
  double sz = std::pow(static_cast<double>(set.base_dim()), n);
  require(sz <= static_cast<double>(size_cap), ErrorCode::SizeCap, "lifted dimension exceeds the size cap");
  LiftedSet out;
  out.base = set;
  out.n_copies = n;
  out.base_extremes = extreme_points(set);
  out.dim = static_cast<int>(sz);
  const int k = static_cast<int>(out.base_extremes.size());
  std::vector<int> idx(n, 0);
  while (true) {
    Orbit orb{idx, 0};
    std::vector<int> perm = idx;
    Mat acc = Mat::Zero(out.dim, out.dim);
    do {
      acc += product_extreme(out.base_extremes, perm).matrix();
      ++orb.multiplicity;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.extremes.push_back(HermitianOperator::from_raw(acc / static_cast<double>(orb.multiplicity)));
    out.orbit_reps.push_back(orb);
    // next nondecreasing sequence
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == k - 1) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int q = pos + 1; q < n; ++q) idx[q] = idx[pos];
  }
  return out;
}

SupportValue support_function(const LiftedSet& set, const HermitianOperator& x) {
  require(x.dim() == set.dim, ErrorCode::ShapeMismatch, "support function argument has wrong dimension");
  const int k = static_cast<int>(set.base_extremes.size()), n = set.n_copies;
  double total = std::pow(static_cast<double>(k), n);
  require(total <= 1e6, ErrorCode::SizeCap, "too many product extremes");
  std::vector<int> idx(n, 0);
  SupportValue best{-std::numeric_limits<double>::infinity(), 0};
  for (long flat = 0; flat < static_cast<long>(total); ++flat) {
    long r = flat;
    for (int q = n - 1; q >= 0; --q) {
      idx[q] = static_cast<int>(r % k);
      r /= k;
    }
    double v = trace_product(product_extreme(set.base_extremes, idx), x);
    if (flat == 0 || v > best.value + 1e-15 * std::max(1.0, std::abs(best.value))) best = {v, flat};
  }
  return best;
}

}  // namespace qadd
