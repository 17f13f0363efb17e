#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "critex/charts.hpp"
#include "critex/homogeneous.hpp"
#include "critex/solver.hpp"

namespace critex {

enum class Verdict { StrictMin, StrictMax, Saddle, NonStrictMin, NonStrictMax, Indeterminate };
std::string verdict_name(Verdict v);

struct EvidenceStep {
  std::string stage;  // "hessian" or "P_k"
  int degree = 0;
  std::vector<double> eigenvalues;  // hessian stage only
  double lo = 0.0, hi = 0.0;        // interval image for P_k stages
  std::string case_label;           // "odd", "c1".."c5", "c41".."c45", "c51".."c55"
  std::vector<std::string> active_constraints;
  std::vector<std::string> notes;
};

struct Classification {
  Verdict verdict = Verdict::Indeterminate;
  std::string reason;  // populated when Indeterminate
  std::vector<EvidenceStep> evidence;
};

struct ClassifyConfig {
  int k_max = 10;
  int depth_max = 4;
  Tolerances tol;
  int subsidiary_seeds_per_axis = 7;
  long subsidiary_max_seeds = 60000;
  bool parallel = true;
  int vanish_samples = 200;  // Newton-projected samples for vanishing checks
};

struct Witness {
  std::vector<double> x;
  std::vector<Rational> x_exact;
  bool exact = false;
  double value = 0.0;
  Rational value_exact;
  bool on_family = false;
};

struct ZeroSetSummary {
  std::vector<Witness> isolated;
  std::vector<Witness> family_samples;
  bool has_family = false;
};

struct IntervalImage {
  double lo = 0.0, hi = 0.0;
  bool lo_exact = false, hi_exact = false;
  Rational lo_q, hi_q;
  std::vector<Witness> minimizers, maximizers;
  ZeroSetSummary zeros;
};

// Objective restricted to the unit sphere intersected with earlier vanishing
// sets, in displacement coordinates around the expansion point.
struct SubsidiaryProblem {
  int dim = 0;
  Poly objective;
  // False when the objective's coefficients came from floating-point tensors;
  // zero decisions then stay tolerance-based even at exact witnesses.
  bool objective_exact = true;
  std::vector<Poly> constraints;  // first entry is the unit sphere
  std::vector<std::string> constraint_labels;
  bool descent_incomplete = false;
};

SubsidiaryProblem make_sphere_problem(int dim, Poly objective);

// Replace a rank-deficient appended constraint: iterated radical of perfect
// powers, then the sum-of-even-powers split into coordinate hyperplanes.
// `incomplete` is set when neither rule applies.
std::vector<Poly> reexpress_degenerate(const Poly& constraint, bool* incomplete);

// Append the vanished objective as a constraint (re-expressed) and install
// the next component as the new objective.
SubsidiaryProblem zero_set_descent(const SubsidiaryProblem& prev, const Poly& vanished_objective,
                                   const Poly& next_objective);

// Min/max of the objective over the variety via the critical-point solver;
// throws std::runtime_error on search-coverage failure.
IntervalImage solve_subsidiary(const SubsidiaryProblem& S, const ClassifyConfig& cfg);

Classification second_derivative_test(const std::vector<double>& hessian, int n,
                                      const Tolerances& tol);

// Ordered supply of homogeneous Taylor components at a critical point.
// When `exhaustive`, components beyond max_degree are identically zero.
class TaylorSource {
 public:
  // center_exact: the expansion point is the true critical point (not a
  // floating approximation), so vanishing tests may be decided exactly.
  static TaylorSource from_polynomial(const Poly& f, std::span<const Rational> center, int k_max,
                                      bool center_exact = true);
  static TaylorSource from_reduced(const ConstrainedProblem& P, const Chart& chart,
                                   const CriticalPoint& cp, int k_max, const Tolerances& tol);

  int dim() const { return dim_; }
  bool exhaustive() const { return exhaustive_; }
  int max_degree() const { return max_degree_; }
  bool exact() const { return exact_; }
  // Component of degree k (zero polynomial when absent); k <= max_degree.
  const HomogeneousPoly& component(int k);

 private:
  int dim_ = 0;
  bool exhaustive_ = false;
  bool exact_ = true;
  int max_degree_ = 0;
  std::vector<std::optional<HomogeneousPoly>> cache_;
  std::function<HomogeneousPoly(int)> compute_;
};

Classification higher_derivative_test(TaylorSource& src, const ClassifyConfig& cfg);

// Hessian test first, higher derivative test on the reduced components when
// the Hessian is indecisive.
Classification classify_point(const ConstrainedProblem& P, const CriticalPoint& cp,
                              const ClassifyConfig& cfg);

}  // namespace critex
