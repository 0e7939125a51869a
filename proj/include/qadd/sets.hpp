#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qadd/opcore.hpp"

namespace qadd {

struct FiniteHull {
  std::vector<HermitianOperator> extremes;
};
struct AVQubit {
  double lambda = 0.0;
};
struct WernerRainsSlice {
  int d = 2;
};
struct ManaStrangeSlice {};
struct SingleState {
  HermitianOperator sigma;
};
// {pi_A (x) sigma_B : sigma_B a state}
struct ProductMarginal {
  int dim_a = 2;
  int dim_b = 2;
};

using SetVariant = std::variant<FiniteHull, AVQubit, WernerRainsSlice, ManaStrangeSlice, SingleState, ProductMarginal>;

class ConvexSetSpec {
 public:
  ConvexSetSpec() = default;
  explicit ConvexSetSpec(SetVariant v);

  static ConvexSetSpec hull(std::vector<HermitianOperator> extremes);
  static ConvexSetSpec av_qubit(double lambda) { return ConvexSetSpec(AVQubit{lambda}); }
  static ConvexSetSpec werner_rains(int d) { return ConvexSetSpec(WernerRainsSlice{d}); }
  static ConvexSetSpec mana_strange() { return ConvexSetSpec(ManaStrangeSlice{}); }
  static ConvexSetSpec single(const HermitianOperator& s) { return ConvexSetSpec(SingleState{s}); }
  static ConvexSetSpec product_marginal(int da, int db) { return ConvexSetSpec(ProductMarginal{da, db}); }

  const SetVariant& variant() const { return v_; }
  int base_dim() const;
  bool finitely_generated() const;
  std::string type_name() const;

 private:
  SetVariant v_;
};

struct SupportValue {
  double value = 0.0;
  long index = 0;
};

struct Orbit {
  std::vector<int> multi_index;  // nondecreasing base extreme indices
  long multiplicity = 1;         // number of distinct permutations
};

struct LiftedSet {
  ConvexSetSpec base;
  int n_copies = 1;
  std::vector<HermitianOperator> base_extremes;
  std::vector<Orbit> orbit_reps;
  std::vector<HermitianOperator> extremes;  // symmetrized orbit averages, same order as orbit_reps
  int dim = 0;
};

std::vector<HermitianOperator> extreme_points(const ConvexSetSpec& set);
SupportValue support_function(const ConvexSetSpec& set, const HermitianOperator& x);
// maximum over the k^n product extremes; index is the base-k flattened multi-index
SupportValue support_function(const LiftedSet& set, const HermitianOperator& x);

LiftedSet lift(const ConvexSetSpec& set, int n, long size_cap = kDefaultSizeCap);
long binomial(int n, int k);
HermitianOperator product_extreme(const std::vector<HermitianOperator>& base, const std::vector<int>& idx);

// states and slice data used by the shipped examples
Eigen::VectorXcd plus_ket();
Eigen::VectorXcd minus_ket();
DensityState plus_state();
HermitianOperator sym_state(int d);   // 2 P_sym / (d(d+1))
HermitianOperator asym_state(int d);  // 2 P_as / (d(d-1))
DensityState werner_state(double p, int d);
HermitianOperator strange_projector();
DensityState strange_state(double p);
HermitianOperator strange_twirl(const HermitianOperator& s);
// qutrit Wigner function at the 9 phase points, row-major in (q, p)
std::vector<double> qutrit_wigner(const HermitianOperator& s);
double wigner_norm(const HermitianOperator& s);

struct SliceVertex {
  double a = 0.0, b = 0.0;
};
// vertices (origin dropped) of {(a,b) >= 0 : norm(a X + b Y) <= 1}
std::vector<SliceVertex> werner_slice_vertices(int d);
std::vector<SliceVertex> mana_slice_vertices();

}  // namespace qadd
