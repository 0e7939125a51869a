#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qadd/error.hpp"

namespace qadd {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// absolute symmetry tolerance for user-facing operators
inline constexpr double kHermTol = 1e-12;
// eigenvalues in [-kClampTol, 0] are treated as exact zeros
inline constexpr double kClampTol = 1e-10;
// relative rank cliff: lambda <= kRankTol * lambda_max is outside the support
inline constexpr double kRankTol = 1e-13;
inline constexpr long kDefaultSizeCap = 4096;

struct EigenSystem {
  RVec values;  // ascending
  Mat vectors;  // columns, phase fixed
};

class HermitianOperator {
 public:
  HermitianOperator();
  // validates symmetry (kHermTol, scaled by max(1, |A|_max))
  explicit HermitianOperator(const Mat& m);

  // symmetrizes without validation; for results of internal arithmetic
  static HermitianOperator from_raw(const Mat& m);
  static HermitianOperator diagonal(const std::vector<double>& d);
  static HermitianOperator identity(int d);
  static HermitianOperator zero(int d);
  static HermitianOperator projector(const Eigen::VectorXcd& v);  // |v><v| (v normalized by caller)

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  cplx operator()(int j, int k) const { return m_(j, k); }

  const EigenSystem& eig() const;
  double trace() const { return m_.trace().real(); }
  double max_abs() const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  struct Cache;
  Mat m_;
  std::shared_ptr<Cache> cache_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

// positive semidefinite, unit trace
class DensityState {
 public:
  DensityState() = default;
  explicit DensityState(const HermitianOperator& op);
  explicit DensityState(const Mat& m) : DensityState(HermitianOperator(m)) {}
  const HermitianOperator& op() const { return op_; }
  int dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

struct SystemShape {
  std::vector<int> local_dims;
  int total() const;
};

// sorted ascending; each eigenvector's largest-magnitude entry made real positive
EigenSystem eig_hermitian(const HermitianOperator& a);

enum class SupportMode { OnSupport, Strict };

// f in {log, x^theta}; carries its own divided difference
struct ScalarFn {
  enum class Kind { Log, Power };
  Kind kind = Kind::Log;
  double theta = 1.0;

  static ScalarFn log() { return {Kind::Log, 0.0}; }
  static ScalarFn power(double t) { return {Kind::Power, t}; }

  double operator()(double x) const;
  double derivative(double x) const;
  // (f(x)-f(y))/(x-y), analytic limit when |x-y| <= 1e-9 max(x,y)
  double divided(double x, double y) const;
};

// eigenvalues after clamping; entries below the rank cliff become exact zeros
RVec clamped_spectrum(const HermitianOperator& a);
std::vector<bool> support_mask(const HermitianOperator& a);
int support_rank(const HermitianOperator& a);
HermitianOperator support_projector(const HermitianOperator& a);
bool is_psd(const HermitianOperator& a, double tol = kClampTol);

HermitianOperator fn_apply(const HermitianOperator& a, const std::function<double(double)>& f,
                           SupportMode mode = SupportMode::OnSupport);
HermitianOperator fn_apply(const HermitianOperator& a, const ScalarFn& f,
                           SupportMode mode = SupportMode::OnSupport);
HermitianOperator mpow(const HermitianOperator& a, double p, SupportMode mode = SupportMode::OnSupport);
HermitianOperator mlog(const HermitianOperator& a, SupportMode mode = SupportMode::OnSupport);
// U diag(lambda^w) U^dagger on the support; general (non-Hermitian) result
Mat cpow(const HermitianOperator& a, cplx w, SupportMode mode = SupportMode::OnSupport);

// Daleckii-Krein: in the eigenbasis of A, out_jk = Delta_f(l_j, l_k) H_jk
HermitianOperator frechet_dk(const HermitianOperator& a, const ScalarFn& f, const HermitianOperator& h,
                             SupportMode mode = SupportMode::Strict);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator tensor_power(const HermitianOperator& a, int n, long size_cap = kDefaultSizeCap);
HermitianOperator partial_transpose(const HermitianOperator& a, const SystemShape& shape, int subsystem);
HermitianOperator partial_trace(const HermitianOperator& a, const SystemShape& shape,
                                const std::vector<int>& traced);
// output factor k is input factor perm[k]
HermitianOperator permute_systems(const HermitianOperator& a, const SystemShape& shape,
                                  const std::vector<int>& perm);

double trace_norm(const HermitianOperator& a);
double trace_product(const HermitianOperator& a, const HermitianOperator& b);  // Re Tr[AB]
double op_norm(const Mat& m);
bool commutes(const HermitianOperator& a, const HermitianOperator& b, double tol = 1e-9);
// supp(inner) contained in supp(outer)
bool support_contains(const HermitianOperator& outer, const HermitianOperator& inner, double tol = 1e-9);

}  // namespace qadd
