#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "critex/poly.hpp"

namespace critex {

// Degree-k homogeneous Taylor component in displacement coordinates Y = X - X0.
// Coefficients are always stored as exact rationals; `exact` records whether
// they came from exact arithmetic (rational center) or from floating point.
struct HomogeneousPoly {
  int degree = 0;
  Poly p;
  bool exact = true;

  bool is_zero() const { return p.is_zero(); }
};

// Nonzero homogeneous components P_k, 1 <= k <= min(k_max, deg e), of e
// recentered at X0. Their sum plus e(X0) reproduces e when k_max >= deg e.
std::vector<HomogeneousPoly> taylor_components(const Poly& e, std::span<const Rational> center,
                                               int k_max);

// (lambda, p) iff P equals lambda * (sum of squares)^p exactly.
std::optional<std::pair<Rational, int>> spherical_power_form(const HomogeneousPoly& P);

// Largest j >= 2 with P == c * Q^j; returns (c, Q, j).
struct PerfectPower {
  Rational scale;
  Poly root;
  int exponent;
};
std::optional<PerfectPower> perfect_power(const Poly& p);

// For P = sum of c_i * x_i^{2e_i} with all c_i of one sign and disjoint
// variables: the real zero set is the coordinate subspace {x_i = 0}, so the
// constraint splits into those linear factors.
std::optional<std::vector<Poly>> sum_of_even_powers_split(const Poly& p);

}  // namespace critex
