#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critex/charts.hpp"
#include "critex/config.hpp"
#include "critex/problem.hpp"

namespace critex {

struct SearchConfig {
  std::vector<std::pair<double, double>> box;  // per-variable bounds, size d
  int seeds_per_axis = 9;
  long max_total_seeds = 200000;  // per-axis count is reduced to stay under this
  int newton_max_iter = 100;      // degenerate roots converge only linearly
  Tolerances tol;
  bool parallel = true;
  int family_arc_steps = 16;
  double family_step_scale = 0.5;  // fraction of the smallest grid spacing

  static SearchConfig cube(int dim, double half_width, int seeds = 9);
  double grid_spacing() const;
  void validate(int dim) const;
};

struct CriticalPoint {
  std::vector<double> x;
  std::vector<Rational> x_exact;  // filled when every coordinate snapped and verified
  bool exact = false;
  Chart chart;  // strongest valid chart at the point
  double constraint_residual = 0.0;
  double gradient_residual = 0.0;
  double newton_residual = 0.0;
  int system_rank = 0;
  int system_size = 0;
  bool family_flag = false;
  int family_id = -1;
};

struct FamilySample {
  std::vector<double> x;
  std::vector<double> tangent;
};

struct Family {
  int id = 0;
  std::vector<int> members;  // indices into SolveResult::points
  std::vector<FamilySample> samples;
};

struct SeedStats {
  long seeds = 0;
  long converged = 0;
  long rejected_chart = 0;
  long rejected_residual = 0;
};

struct SolveResult {
  std::vector<CriticalPoint> points;
  std::vector<Family> families;
  std::vector<std::pair<std::string, SeedStats>> per_chart;
};

// Full search: every chart pattern, denominator-cleared
// polynomial system, multi-start Newton over the seed grid, cross-chart
// dedup, family detection. Deterministic for a fixed config.
SolveResult find_critical_points(const ConstrainedProblem& P, const SearchConfig& cfg);

// Newton-polish one approximate point inside a given chart.
CriticalPoint refine(const ConstrainedProblem& P, const Chart& chart, std::span<const double> x0,
                     const SearchConfig& cfg);

// Family detection pass on already-deduplicated points (find_critical_points
// runs this itself; exposed for direct use).
void detect_family(SolveResult& result, const ConstrainedProblem& P, const SearchConfig& cfg);

// --- Newton sweep kernel -----------------------------------------------------

// Flattened polynomial for fast repeated double evaluation.
struct CompiledPoly {
  int nvars = 0;
  int nterms = 0;
  std::vector<double> coef;
  std::vector<unsigned> exps;  // nterms * nvars
  unsigned max_exp = 0;

  static CompiledPoly from(const Poly& p);
  double eval(std::span<const double> pow_table, int stride) const;
};

struct CompiledSystem {
  int dim = 0;
  unsigned max_exp = 0;
  std::vector<CompiledPoly> eqs;  // dim equations
  std::vector<CompiledPoly> jac;  // dim*dim, row-major

  static CompiledSystem compile(const CriticalSystem& sys, int dim);
  void fill_pow_table(std::span<const double> x, std::vector<double>& table) const;
};

struct NewtonOutcome {
  bool converged = false;
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
};

NewtonOutcome newton_solve(const CompiledSystem& sys, std::span<const double> x0, int max_iter,
                           double escape_radius);

// Serial reference and OpenMP twin; both produce identical outputs for the
// same inputs (each seed is an independent pure computation).
std::vector<NewtonOutcome> newton_sweep_serial(const CompiledSystem& sys,
                                               std::span<const double> seeds_flat, int max_iter,
                                               double escape_radius);
std::vector<NewtonOutcome> newton_sweep_parallel(const CompiledSystem& sys,
                                                 std::span<const double> seeds_flat, int max_iter,
                                                 double escape_radius);

// Row-major seed grid for the box (seeds_per_axis^dim points, capped).
std::vector<double> make_seed_grid(const SearchConfig& cfg, int dim);

}  // namespace critex
