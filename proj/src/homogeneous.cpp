#include "critex/homogeneous.hpp"

#include <stdexcept>

namespace critex {

std::vector<HomogeneousPoly> taylor_components(const Poly& e, std::span<const Rational> center,
                                               int k_max) {
  if (k_max < 1) throw std::invalid_argument("taylor_components: k_max must be >= 1");
  const Poly shifted = e.shifted(center);  // e(Y + X0), exact
  std::vector<HomogeneousPoly> out;
  for (auto& [k, part] : shifted.homogeneous_parts()) {
    if (k < 1 || k > k_max) continue;
    out.push_back(HomogeneousPoly{k, std::move(part), true});
  }
  return out;
}

std::optional<std::pair<Rational, int>> spherical_power_form(const HomogeneousPoly& P) {
  if (P.is_zero()) return std::nullopt;
  const int k = P.degree;
  if (k % 2 != 0 || k == 0) return std::nullopt;
  const int p = k / 2;
  const int nv = P.p.nvars();
  // lambda is the coefficient of any pure power x_i^k.
  Monomial pure(nv, 0u);
  pure[0] = static_cast<unsigned>(k);
  const Rational* c = P.p.coeff(pure);
  if (!c) return std::nullopt;
  const Rational lambda = *c;
  Poly sum_sq(nv);
  for (int v = 0; v < nv; ++v) {
    Monomial sq(nv, 0u);
    sq[v] = 2;
    sum_sq.add_term(sq, Rational(1));
  }
  if (P.p == sum_sq.pow(static_cast<unsigned>(p)) * lambda) return std::make_pair(lambda, p);
  return std::nullopt;
}

namespace {

// Greedy lex root extraction: q starts from the j-th root of the leading
// term of p/c and grows one monomial at a time while p - c*q^j shrinks.
std::optional<Poly> poly_nth_root(const Poly& p, const Rational& scale, int j) {
  const int nv = p.nvars();
  const auto [lm, lc] = p.leading_term();
  Monomial root_m(nv, 0u);
  for (int v = 0; v < nv; ++v) {
    if (lm[v] % j != 0) return std::nullopt;
    root_m[v] = lm[v] / static_cast<unsigned>(j);
  }
  Poly q(nv);
  q.add_term(root_m, Rational(1));
  const size_t max_terms = p.terms().size() * static_cast<size_t>(j) + 8;
  for (size_t guard = 0; guard < max_terms; ++guard) {
    Poly r = p - q.pow(static_cast<unsigned>(j)) * scale;
    if (r.is_zero()) return q;
    const auto [rm, rc] = r.leading_term();
    // Next term t satisfies j * scale * q_lead^(j-1) * t = leading(r).
    Monomial tm(nv, 0u);
    for (int v = 0; v < nv; ++v) {
      const unsigned need = root_m[v] * static_cast<unsigned>(j - 1);
      if (rm[v] < need) return std::nullopt;
      tm[v] = rm[v] - need;
    }
    const Rational tc = rc / (scale * Rational(j));
    // Monomial order must strictly decrease, otherwise the root cannot exist.
    if (!(tm < root_m)) return std::nullopt;
    Poly t(nv);
    t.add_term(tm, tc);
    q += t;
  }
  return std::nullopt;
}

}  // namespace

std::optional<PerfectPower> perfect_power(const Poly& p) {
  if (p.is_zero() || p.total_degree() < 2) return std::nullopt;
  const auto [lm, lc] = p.leading_term();
  for (int j = p.total_degree(); j >= 2; --j) {
    // The leading coefficient of q is normalized to 1, so the scale is lc.
    auto q = poly_nth_root(p, lc, j);
    if (q) return PerfectPower{lc, std::move(*q), j};
  }
  return std::nullopt;
}

std::optional<std::vector<Poly>> sum_of_even_powers_split(const Poly& p) {
  if (p.is_zero()) return std::nullopt;
  const int nv = p.nvars();
  int sign = 0;
  std::vector<bool> seen(nv, false);
  std::vector<int> vars;
  for (const auto& [m, c] : p.terms()) {
    int var = -1;
    for (int v = 0; v < nv; ++v) {
      if (m[v] == 0) continue;
      if (var >= 0) return std::nullopt;  // mixed monomial
      var = v;
    }
    if (var < 0) return std::nullopt;              // constant term
    if (m[var] % 2 != 0 || m[var] == 0) return std::nullopt;
    if (seen[var]) return std::nullopt;            // variable repeated
    const int s = sgn(c);
    if (sign == 0) sign = s;
    if (s != sign) return std::nullopt;            // mixed signs
    seen[var] = true;
    vars.push_back(var);
  }
  if (vars.size() < 2) return std::nullopt;
  std::sort(vars.begin(), vars.end());
  std::vector<Poly> out;
  out.reserve(vars.size());
  for (int v : vars) out.push_back(Poly::variable(nv, v));
  return out;
}

}  // namespace critex
