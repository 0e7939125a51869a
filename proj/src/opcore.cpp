#include "qadd/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qadd {

struct HermitianOperator::Cache {
  std::once_flag once;
  EigenSystem sys;
};

HermitianOperator::HermitianOperator() : cache_(std::make_shared<Cache>()) {}

HermitianOperator::HermitianOperator(const Mat& m) : m_(m), cache_(std::make_shared<Cache>()) {
  require(m.rows() == m.cols(), ErrorCode::ShapeMismatch, "operator must be square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int j = 0; j < m.rows(); ++j)
    for (int k = j; k < m.cols(); ++k)
      if (std::abs(m(j, k) - std::conj(m(k, j))) > kHermTol * scale) {
        std::ostringstream os;
        os << "entry (" << j << "," << k << ") is not the conjugate of (" << k << "," << j << ")";
        fail(ErrorCode::NonHermitian, os.str());
      }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::from_raw(const Mat& m) {
  HermitianOperator h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& d) {
  Mat m = Mat::Zero(d.size(), d.size());
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return from_raw(m);
}

HermitianOperator HermitianOperator::identity(int d) { return from_raw(Mat::Identity(d, d)); }
HermitianOperator HermitianOperator::zero(int d) { return from_raw(Mat::Zero(d, d)); }

HermitianOperator HermitianOperator::projector(const Eigen::VectorXcd& v) {
  return from_raw(v * v.adjoint());
}

const EigenSystem& HermitianOperator::eig() const {
  std::call_once(cache_->once, [this] { cache_->sys = eig_hermitian(*this); });
  return cache_->sys;
}

double HermitianOperator::max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  require(dim() == o.dim(), ErrorCode::ShapeMismatch, "dimension mismatch in sum");
  return from_raw(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  require(dim() == o.dim(), ErrorCode::ShapeMismatch, "dimension mismatch in difference");
  return from_raw(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return from_raw(m_ * s); }

DensityState::DensityState(const HermitianOperator& op) : op_(op) {
  const RVec& ev = op.eig().values;
  require(ev.size() > 0, ErrorCode::ValidationError, "empty state");
  require(ev(0) >= -kClampTol, ErrorCode::ValidationError, "state has a negative eigenvalue");
  require(std::abs(op.trace() - 1.0) <= 1e-10, ErrorCode::ValidationError, "state trace differs from 1");
}

int SystemShape::total() const {
  return std::accumulate(local_dims.begin(), local_dims.end(), 1, std::multiplies<int>());
}

EigenSystem eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix());
  require(es.info() == Eigen::Success, ErrorCode::NotConverged, "eigensolver failed");
  EigenSystem s{es.eigenvalues(), es.eigenvectors()};
  // Eigen already sorts ascending; fix phases
  for (int c = 0; c < s.vectors.cols(); ++c) {
    int best = 0;
    double bm = -1.0;
    for (int r = 0; r < s.vectors.rows(); ++r) {
      double m = std::abs(s.vectors(r, c));
      if (m > bm + 1e-12) {
        bm = m;
        best = r;
      }
    }
    cplx ph = s.vectors(best, c);
    if (std::abs(ph) > 0) s.vectors.col(c) *= std::conj(ph) / std::abs(ph);
  }
  return s;
}

double ScalarFn::operator()(double x) const {
  return kind == Kind::Log ? std::log(x) : std::pow(x, theta);
}

double ScalarFn::derivative(double x) const {
  return kind == Kind::Log ? 1.0 / x : theta * std::pow(x, theta - 1.0);
}

double ScalarFn::divided(double x, double y) const {
  double d = x - y;
  if (std::abs(d) <= 1e-9 * std::max(x, y)) return derivative(0.5 * (x + y));
  double u = std::log1p(d / y);  // log(x/y)
  if (kind == Kind::Log) return u / d;
  return std::pow(y, theta) * std::expm1(theta * u) / d;
}

RVec clamped_spectrum(const HermitianOperator& a) {
  RVec ev = a.eig().values;
  double lmax = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  double cliff = kRankTol * lmax;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) <= cliff && ev(i) >= -std::max(kClampTol, kClampTol * lmax)) ev(i) = 0.0;
  return ev;
}

std::vector<bool> support_mask(const HermitianOperator& a) {
  RVec ev = clamped_spectrum(a);
  std::vector<bool> m(ev.size());
  for (int i = 0; i < ev.size(); ++i) m[i] = ev(i) > 0.0;
  return m;
}

int support_rank(const HermitianOperator& a) {
  auto m = support_mask(a);
  return static_cast<int>(std::count(m.begin(), m.end(), true));
}

bool is_psd(const HermitianOperator& a, double tol) {
  RVec ev = a.eig().values;
  if (ev.size() == 0) return true;
  return ev(0) >= -tol * std::max(1.0, ev.maxCoeff());
}

static void check_psd(const RVec& ev) {
  for (int i = 0; i < ev.size(); ++i)
    require(ev(i) >= 0.0, ErrorCode::InvalidArgument, "matrix function requires a positive semidefinite argument");
}

HermitianOperator support_projector(const HermitianOperator& a) {
  const auto& U = a.eig().vectors;
  auto m = support_mask(a);
  Mat p = Mat::Zero(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i)
    if (m[i]) p += U.col(i) * U.col(i).adjoint();
  return HermitianOperator::from_raw(p);
}

HermitianOperator fn_apply(const HermitianOperator& a, const std::function<double(double)>& f, SupportMode mode) {
  RVec ev = clamped_spectrum(a);
  check_psd(ev);
  const auto& U = a.eig().vectors;
  RVec fv(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) {
      fv(i) = f(ev(i));
    } else {
      require(mode == SupportMode::OnSupport, ErrorCode::SingularStrict, "operator is singular");
      fv(i) = 0.0;
    }
  }
  return HermitianOperator::from_raw(U * fv.asDiagonal() * U.adjoint());
}

HermitianOperator fn_apply(const HermitianOperator& a, const ScalarFn& f, SupportMode mode) {
  return fn_apply(a, [&f](double x) { return f(x); }, mode);
}

HermitianOperator mpow(const HermitianOperator& a, double p, SupportMode mode) {
  if (p == 1.0) return a;
  return fn_apply(a, [p](double x) { return p == 0.0 ? 1.0 : std::pow(x, p); }, mode);
}

HermitianOperator mlog(const HermitianOperator& a, SupportMode mode) {
  return fn_apply(a, [](double x) { return std::log(x); }, mode);
}

Mat cpow(const HermitianOperator& a, cplx w, SupportMode mode) {
  RVec ev = clamped_spectrum(a);
  check_psd(ev);
  const auto& U = a.eig().vectors;
  Eigen::VectorXcd fv(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) {
      fv(i) = std::exp(w * std::log(ev(i)));
    } else {
      require(mode == SupportMode::OnSupport, ErrorCode::SingularStrict, "operator is singular");
      fv(i) = 0.0;
    }
  }
  return U * fv.asDiagonal() * U.adjoint();
}

HermitianOperator frechet_dk(const HermitianOperator& a, const ScalarFn& f, const HermitianOperator& h,
                             SupportMode mode) {
  require(a.dim() == h.dim(), ErrorCode::ShapeMismatch, "direction has wrong dimension");
  RVec ev = clamped_spectrum(a);
  check_psd(ev);
  const auto& U = a.eig().vectors;
  Mat hb = U.adjoint() * h.matrix() * U;
  const int d = a.dim();
  bool singular = false;
  for (int i = 0; i < d; ++i) singular |= !(ev(i) > 0.0);
  if (singular) {
    require(mode == SupportMode::OnSupport, ErrorCode::SingularStrict, "operator is singular");
    double leak = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (!(ev(j) > 0.0) || !(ev(k) > 0.0)) leak = std::max(leak, std::abs(hb(j, k)));
    require(leak <= 1e-9 * std::max(1.0, h.max_abs()), ErrorCode::SupportViolation,
            "direction leaks outside the support");
  }
  Mat out = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if (ev(j) > 0.0 && ev(k) > 0.0) out(j, k) = f.divided(ev(j), ev(k)) * hb(j, k);
  return HermitianOperator::from_raw(U * out * U.adjoint());
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  const int da = a.dim(), db = b.dim();
  Mat out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
  return HermitianOperator::from_raw(out);
}

HermitianOperator tensor_power(const HermitianOperator& a, int n, long size_cap) {
  require(n >= 1, ErrorCode::InvalidArgument, "tensor power needs n >= 1");
  double sz = std::pow(static_cast<double>(a.dim()), n);
  require(sz <= static_cast<double>(size_cap), ErrorCode::SizeCap, "tensor power exceeds the size cap");
  HermitianOperator out = a;
  for (int i = 1; i < n; ++i) out = kron(out, a);
  return out;
}

namespace {

// digits of a row-major multi-index
std::vector<int> digits(int idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    d[s] = idx % dims[s];
    idx /= dims[s];
  }
  return d;
}

int compose(const std::vector<int>& d, const std::vector<int>& dims) {
  int idx = 0;
  for (size_t s = 0; s < dims.size(); ++s) idx = idx * dims[s] + d[s];
  return idx;
}

void check_shape(const HermitianOperator& a, const SystemShape& shape) {
  require(!shape.local_dims.empty() && shape.total() == a.dim(), ErrorCode::ShapeMismatch,
          "system shape does not match the operator dimension");
}

}  // namespace

HermitianOperator partial_transpose(const HermitianOperator& a, const SystemShape& shape, int subsystem) {
  check_shape(a, shape);
  require(subsystem >= 0 && subsystem < static_cast<int>(shape.local_dims.size()), ErrorCode::ShapeMismatch,
          "subsystem index out of range");
  const int d = a.dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i) {
    auto di = digits(i, shape.local_dims);
    for (int j = 0; j < d; ++j) {
      auto dj = digits(j, shape.local_dims);
      std::swap(di[subsystem], dj[subsystem]);
      out(compose(di, shape.local_dims), compose(dj, shape.local_dims)) = a(i, j);
      std::swap(di[subsystem], dj[subsystem]);
    }
  }
  return HermitianOperator::from_raw(out);
}

HermitianOperator partial_trace(const HermitianOperator& a, const SystemShape& shape, const std::vector<int>& traced) {
  check_shape(a, shape);
  const auto& dims = shape.local_dims;
  std::vector<int> keep_dims, tr_dims;
  std::vector<bool> is_tr(dims.size(), false);
  for (int t : traced) {
    require(t >= 0 && t < static_cast<int>(dims.size()), ErrorCode::ShapeMismatch, "traced index out of range");
    is_tr[t] = true;
  }
  for (size_t s = 0; s < dims.size(); ++s) (is_tr[s] ? tr_dims : keep_dims).push_back(dims[s]);
  int dk = 1, dt = 1;
  for (int x : keep_dims) dk *= x;
  for (int x : tr_dims) dt *= x;
  const int d = a.dim();
  std::vector<int> kidx(d), tidx(d);
  for (int i = 0; i < d; ++i) {
    auto di = digits(i, dims);
    std::vector<int> kd, td;
    for (size_t s = 0; s < dims.size(); ++s) (is_tr[s] ? td : kd).push_back(di[s]);
    kidx[i] = keep_dims.empty() ? 0 : compose(kd, keep_dims);
    tidx[i] = tr_dims.empty() ? 0 : compose(td, tr_dims);
  }
  std::vector<std::vector<int>> groups(dt);
  for (int i = 0; i < d; ++i) groups[tidx[i]].push_back(i);
  Mat out = Mat::Zero(dk, dk);
  for (const auto& g : groups)
    for (int i : g)
      for (int j : g) out(kidx[i], kidx[j]) += a(i, j);
  return HermitianOperator::from_raw(out);
}

HermitianOperator permute_systems(const HermitianOperator& a, const SystemShape& shape, const std::vector<int>& perm) {
  check_shape(a, shape);
  const auto& dims = shape.local_dims;
  require(perm.size() == dims.size(), ErrorCode::ShapeMismatch, "permutation has wrong length");
  std::vector<int> out_dims(dims.size());
  for (size_t k = 0; k < perm.size(); ++k) out_dims[k] = dims[perm[k]];
  const int d = a.dim();
  std::vector<int> map(d);
  for (int i = 0; i < d; ++i) {
    auto di = digits(i, dims);
    std::vector<int> od(dims.size());
    for (size_t k = 0; k < perm.size(); ++k) od[k] = di[perm[k]];
    map[i] = compose(od, out_dims);
  }
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(map[i], map[j]) = a(i, j);
  return HermitianOperator::from_raw(out);
}

double trace_norm(const HermitianOperator& a) { return a.eig().values.cwiseAbs().sum(); }

double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  return (a.matrix().cwiseProduct(b.matrix().transpose())).sum().real();
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

bool commutes(const HermitianOperator& a, const HermitianOperator& b, double tol) {
  Mat c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  return c.cwiseAbs().maxCoeff() <= tol * (1.0 + a.max_abs() * b.max_abs());
}

bool support_contains(const HermitianOperator& outer, const HermitianOperator& inner, double tol) {
  HermitianOperator p = support_projector(outer);
  Mat q = Mat::Identity(outer.dim(), outer.dim()) - p.matrix();
  double leak = (q * inner.matrix() * q).trace().real();
  return leak <= tol * std::max(1e-300, std::abs(inner.trace()));
}

}  // namespace qadd
