#include "critex/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace critex {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  Rational q(x);
  q.canonicalize();
  return q;
}

std::optional<Rational> snap_to_rational(double x, long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  const double bound = tol * (1.0 + std::abs(x));
  // Continued-fraction convergents p/q of x.
  long p_prev = 1, q_prev = 0;
  long p_cur = static_cast<long>(std::floor(x)), q_cur = 1;
  double frac = x - std::floor(x);
  for (int step = 0; step < 64; ++step) {
    const double approx = static_cast<double>(p_cur) / static_cast<double>(q_cur);
    if (std::abs(x - approx) <= bound) {
      Rational r(p_cur, q_cur);
      r.canonicalize();
      return r;
    }
    if (frac < 1e-18) break;
    const double inv = 1.0 / frac;
    const double a_d = std::floor(inv);
    if (a_d > 1e17) break;
    const long a = static_cast<long>(a_d);
    frac = inv - a_d;
    const long p_next = a * p_cur + p_prev;
    const long q_next = a * q_cur + q_prev;
    if (q_next > max_den || q_next <= 0) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
  }
  return std::nullopt;
}

std::optional<Rational> rational_nth_root(const Rational& q, unsigned n) {
  if (n == 0) return std::nullopt;
  if (n == 1) return q;
  if (sgn(q) < 0 && n % 2 == 0) return std::nullopt;
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  const bool negative = sgn(num) < 0;
  if (negative) num = -num;
  mpz_class rn, rd;
  const int exact_num = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n);
  const int exact_den = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n);
  if (!exact_num || !exact_den) return std::nullopt;
  if (negative) rn = -rn;
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace critex
