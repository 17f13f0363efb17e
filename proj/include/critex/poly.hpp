#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "critex/rational.hpp"

namespace critex {

// Exponent vector; length always equals the owning polynomial's nvars.
using Monomial = std::vector<unsigned>;

unsigned monomial_degree(const Monomial& m);

// Multivariate polynomial with exact rational coefficients, kept in expanded
// normal form: one map entry per monomial, no zero coefficients. Structural
// equality of the maps is the canonical equality test.
class Poly {
 public:
  Poly() : nvars_(0) {}
  explicit Poly(int nvars) : nvars_(nvars) {}
  static Poly constant(int nvars, const Rational& c);
  static Poly variable(int nvars, int i);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int total_degree() const;
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& c);
  const Rational* coeff(const Monomial& m) const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator*(const Rational& c) const;
  Poly pow(unsigned e) const;
  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Poly differentiate(int var) const;

  template <typename T>
  T evaluate(std::span<const T> x) const;

  // Substitute x_i -> x_i + c_i; exact Taylor recentering.
  Poly shifted(std::span<const Rational> center) const;

  // Degree -> homogeneous part (only nonzero parts present).
  std::map<int, Poly> homogeneous_parts() const;
  Poly homogeneous_component(int k) const;
  bool is_homogeneous() const;

  // Re-embed into a ring with more variables (exponents padded with zeros).
  Poly widened(int new_nvars) const;

  // Lexicographically largest monomial; polynomial must be nonzero.
  std::pair<Monomial, Rational> leading_term() const;

  std::string to_string(std::span<const std::string> names) const;

 private:
  int nvars_;
  std::map<Monomial, Rational> terms_;
};

template <typename T>
T Poly::evaluate(std::span<const T> x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw std::invalid_argument("Poly::evaluate: dimension mismatch");
  T acc{};
  if constexpr (std::is_same_v<T, double>) acc = 0.0;
  for (const auto& [mono, c] : terms_) {
    T term;
    if constexpr (std::is_same_v<T, double>)
      term = to_double(c);
    else
      term = c;
    for (int v = 0; v < nvars_; ++v)
      for (unsigned e = 0; e < mono[v]; ++e) term = term * x[v];
    acc = acc + term;
  }
  return acc;
}

}  // namespace critex
