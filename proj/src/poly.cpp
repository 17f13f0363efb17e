#include "critex/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace critex {

unsigned monomial_degree(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

Poly Poly::constant(int nvars, const Rational& c) {
  Poly p(nvars);
  p.add_term(Monomial(nvars, 0u), c);
  return p;
}

Poly Poly::variable(int nvars, int i) {
  if (i < 0 || i >= nvars) throw std::out_of_range("Poly::variable: index out of range");
  Poly p(nvars);
  Monomial m(nvars, 0u);
  m[i] = 1;
  p.terms_.emplace(std::move(m), Rational(1));
  return p;
}

int Poly::total_degree() const {
  int deg = -1;
  for (const auto& [m, c] : terms_) deg = std::max(deg, static_cast<int>(monomial_degree(m)));
  return deg;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != nvars_)
    throw std::invalid_argument("Poly::add_term: monomial arity mismatch");
  Rational cc = c;
  cc.canonicalize();  // callers may hand over unreduced p/q
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (sgn(cc) != 0) terms_.emplace(m, std::move(cc));
    return;
  }
  it->second += cc;
  if (sgn(it->second) == 0) terms_.erase(it);
}

const Rational* Poly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? nullptr : &it->second;
}

Poly Poly::operator-() const {
  Poly r(nvars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly::+=: arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly::-=: arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly Poly::operator*(const Poly& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly::*: arity mismatch");
  Poly r(nvars_);
  Monomial prod(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      for (int v = 0; v < nvars_; ++v) prod[v] = ma[v] + mb[v];
      r.add_term(prod, ca * cb);
    }
  }
  return r;
}

Poly Poly::operator*(const Rational& c) const {
  Poly r(nvars_);
  if (sgn(c) == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly r = Poly::constant(nvars_, Rational(1));
  Poly base = *this;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return r;
}

Poly Poly::differentiate(int var) const {
  if (var < 0 || var >= nvars_) throw std::out_of_range("Poly::differentiate: index out of range");
  Poly r(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    r.add_term(d, c * Rational(m[var]));
  }
  return r;
}

Poly Poly::shifted(std::span<const Rational> center) const {
  if (static_cast<int>(center.size()) != nvars_)
    throw std::invalid_argument("Poly::shifted: dimension mismatch");
  // Per-variable binomial expansion of (x_v + c_v)^e, composed term by term.
  Poly result(nvars_);
  for (const auto& [m, c] : terms_) {
    Poly term = Poly::constant(nvars_, c);
    for (int v = 0; v < nvars_; ++v) {
      if (m[v] == 0) continue;
      Poly base = Poly::variable(nvars_, v) + Poly::constant(nvars_, center[v]);
      term = term * base.pow(m[v]);
    }
    result += term;
  }
  return result;
}

std::map<int, Poly> Poly::homogeneous_parts() const {
  std::map<int, Poly> parts;
  for (const auto& [m, c] : terms_) {
    const int k = static_cast<int>(monomial_degree(m));
    auto [it, inserted] = parts.try_emplace(k, nvars_);
    it->second.add_term(m, c);
  }
  return parts;
}

Poly Poly::homogeneous_component(int k) const {
  Poly r(nvars_);
  for (const auto& [m, c] : terms_)
    if (static_cast<int>(monomial_degree(m)) == k) r.add_term(m, c);
  return r;
}

bool Poly::is_homogeneous() const {
  int deg = -1;
  for (const auto& [m, c] : terms_) {
    const int k = static_cast<int>(monomial_degree(m));
    if (deg == -1) deg = k;
    if (k != deg) return false;
  }
  return true;
}

Poly Poly::widened(int new_nvars) const {
  if (new_nvars < nvars_) throw std::invalid_argument("Poly::widened: cannot shrink");
  if (new_nvars == nvars_) return *this;
  Poly r(new_nvars);
  Monomial m2(new_nvars, 0u);
  for (const auto& [m, c] : terms_) {
    std::copy(m.begin(), m.end(), m2.begin());
    r.terms_.emplace(m2, c);
  }
  return r;
}

std::pair<Monomial, Rational> Poly::leading_term() const {
  if (terms_.empty()) throw std::logic_error("Poly::leading_term: zero polynomial");
  auto it = std::prev(terms_.end());
  return {it->first, it->second};
}

std::string Poly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // Highest degree first, lex within a degree, for readable output.
  std::vector<const std::pair<const Monomial, Rational>*> order;
  order.reserve(terms_.size());
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    const unsigned da = monomial_degree(a->first), db = monomial_degree(b->first);
    if (da != db) return da > db;
    return a->first > b->first;
  });
  for (const auto* t : order) {
    const auto& [m, c] = *t;
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) out << "-";
      first = false;
    } else {
      out << (sgn(c) < 0 ? " - " : " + ");
    }
    const bool is_const = monomial_degree(m) == 0;
    const bool unit = (mag == 1);
    if (!unit || is_const) out << rational_to_string(mag);
    bool printed_var = false;
    for (int v = 0; v < nvars_; ++v) {
      if (m[v] == 0) continue;
      if (printed_var || !unit) out << "*";
      out << (v < static_cast<int>(names.size()) ? names[v] : "x" + std::to_string(v));
      if (m[v] > 1) out << "^" << m[v];
      printed_var = true;
    }
  }
  return out.str();
}

}  // namespace critex
