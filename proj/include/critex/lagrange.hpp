#pragma once

#include <span>
#include <string>
#include <vector>

#include "critex/solver.hpp"

namespace critex {

struct MultiplierVector {
  std::vector<double> lambda;
  std::vector<Rational> lambda_exact;
  bool exact = false;
  Chart chart;
  double stationarity_residual = 0.0;  // max |d(f + sum lambda G)/dx_i| at the point
};

// lambda = -f_v (G'_v)^-1 over the chart's dependent block (m x m solve),
// verified against the full stationarity condition afterwards.
MultiplierVector recover_multipliers(const ConstrainedProblem& P, const CriticalPoint& cp,
                                     const Chart& chart);

enum class OracleVerdict { Min, Max, Saddle, Indeterminate };
std::string oracle_verdict_name(OracleVerdict v);

struct BorderedOracle {
  OracleVerdict verdict = OracleVerdict::Indeterminate;
  // Leading principal minors Gamma_1 .. Gamma_{m+d} of the bordered Hessian.
  std::vector<double> minors;
  std::vector<Rational> minors_exact;
  bool exact = false;
};

// Cross-validation only: the bordered Hessian of L = f + sum lambda_j G_j
// bordered by G's Jacobian, classified by the trailing principal-minor sign
// pattern. Indeterminate whenever the decisive minor vanishes.
BorderedOracle bordered_hessian_oracle(const ConstrainedProblem& P, const CriticalPoint& cp,
                                       const MultiplierVector& mult);

// The bordered matrix with symbolic ambient entries for a fixed rational
// multiplier vector; row/column order: m border rows, then the d variables.
std::vector<std::vector<Poly>> bordered_matrix_polys(const ConstrainedProblem& P,
                                                     std::span<const Rational> lambda);

}  // namespace critex
