#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace critex {

// Exact rational scalar used throughout the symbolic layer.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

// The two-argument mpq_class constructor does not reduce p/q; this does.
inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Exact conversion; every finite IEEE double is a dyadic rational.
Rational rational_from_double(double x);

// Nearest rational with denominator <= max_den via continued fractions,
// accepted only when |x - p/q| <= tol * (1 + |x|).
std::optional<Rational> snap_to_rational(double x, long max_den, double tol);

// Exact n-th root when it exists (n >= 1; negative values allowed for odd n).
std::optional<Rational> rational_nth_root(const Rational& q, unsigned n);

std::string rational_to_string(const Rational& q);

}  // namespace critex
