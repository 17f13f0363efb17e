#include "critex/charts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "critex/linalg.hpp"

namespace critex {

void ConstrainedProblem::validate() const {
  const int d = dim();
  if (d <= 0) throw std::invalid_argument("problem has no variables");
  if (static_cast<int>(var_names.size()) != d)
    throw std::invalid_argument("variable name count does not match dimension");
  for (const auto& g : constraints)
    if (g.nvars() != d) throw std::invalid_argument("constraint arity mismatch");
  if (codim() > d) throw std::invalid_argument("more constraints than variables");
}

Chart Chart::from_dependent(int dim, std::vector<int> dep) {
  std::sort(dep.begin(), dep.end());
  Chart c;
  c.dependent = std::move(dep);
  std::vector<bool> used(dim, false);
  for (int v : c.dependent) {
    if (v < 0 || v >= dim || used[v]) throw std::invalid_argument("bad dependent set");
    used[v] = true;
  }
  for (int v = 0; v < dim; ++v)
    if (!used[v]) c.independent.push_back(v);
  return c;
}

std::string Chart::label(std::span<const std::string> names) const {
  std::string s = "{";
  for (size_t i = 0; i < dependent.size(); ++i) {
    if (i) s += ",";
    const int v = dependent[i];
    s += v < static_cast<int>(names.size()) ? names[v] : "x" + std::to_string(v);
  }
  return s + "}";
}

namespace {

Monomial unit_index(int n, int pos) {
  Monomial e(n, 0u);
  e[pos] = 1;
  return e;
}

int first_nonzero(const Monomial& e) {
  for (size_t i = 0; i < e.size(); ++i)
    if (e[i] > 0) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::vector<Monomial> multi_indices(int n, int k) {
  std::vector<Monomial> out;
  if (n == 0) {
    if (k == 0) out.push_back({});
    return out;
  }
  Monomial cur(n, 0u);
  // Lexicographic enumeration of compositions of k into n parts.
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == n - 1) {
      cur[pos] = rem;
      out.push_back(cur);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, rem - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

double chart_minor_det(const ConstrainedProblem& P, const Chart& chart, std::span<const double> X,
                       double* scale) {
  const int m = static_cast<int>(chart.dependent.size());
  if (m == 0) {
    if (scale) *scale = 1.0;
    return 1.0;
  }
  std::vector<double> a(m * m, 0.0);
  double max_row = 0.0;
  for (int r = 0; r < m; ++r) {
    double row_norm = 0.0;
    for (int c = 0; c < m; ++c) {
      const double v = P.constraints[r].differentiate(chart.dependent[c]).evaluate(X);
      a[r * m + c] = v;
      row_norm = std::max(row_norm, std::abs(v));
    }
    max_row = std::max(max_row, row_norm);
  }
  if (scale) *scale = std::pow(std::max(1.0, max_row), m);
  DenseSolver<double> s;
  try {
    s.factor(std::move(a), m);
  } catch (const std::runtime_error&) {
    return 0.0;
  }
  return s.det;
}

bool chart_valid_at(const ConstrainedProblem& P, const Chart& chart, std::span<const double> X,
                    double rank_tol) {
  double scale = 1.0;
  const double det = chart_minor_det(P, chart, X, &scale);
  return std::abs(det) > rank_tol * scale;
}

std::vector<Chart> enumerate_charts(const ConstrainedProblem& P, std::span<const double> X,
                                    double rank_tol) {
  const int d = P.dim();
  const int m = P.codim();
  std::vector<std::pair<double, Chart>> valid;
  std::vector<int> pick(m);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == m) {
      Chart c = Chart::from_dependent(d, std::vector<int>(pick.begin(), pick.end()));
      double scale = 1.0;
      const double det = chart_minor_det(P, c, X, &scale);
      if (std::abs(det) > rank_tol * scale) valid.emplace_back(std::abs(det), std::move(c));
      return;
    }
    for (int v = start; v < d; ++v) {
      pick[depth] = v;
      self(self, v + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  std::stable_sort(valid.begin(), valid.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.dependent < b.second.dependent;
  });
  std::vector<Chart> out;
  out.reserve(valid.size());
  for (auto& [det, c] : valid) out.push_back(std::move(c));
  return out;
}

Poly poly_det(const std::vector<std::vector<Poly>>& M, int nvars) {
  const int n = static_cast<int>(M.size());
  if (n == 0) return Poly::constant(nvars, Rational(1));
  if (n == 1) return M[0][0];
  Poly acc(nvars);
  for (int c = 0; c < n; ++c) {
    if (M[0][c].is_zero()) continue;
    std::vector<std::vector<Poly>> minor;
    minor.reserve(n - 1);
    for (int r = 1; r < n; ++r) {
      std::vector<Poly> row;
      row.reserve(n - 1);
      for (int cc = 0; cc < n; ++cc)
        if (cc != c) row.push_back(M[r][cc]);
      minor.push_back(std::move(row));
    }
    Poly term = M[0][c] * poly_det(minor, nvars);
    if (c % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

std::vector<std::vector<Poly>> poly_adjugate(const std::vector<std::vector<Poly>>& M, int nvars) {
  const int n = static_cast<int>(M.size());
  std::vector<std::vector<Poly>> adj(n, std::vector<Poly>(n, Poly(nvars)));
  if (n == 1) {
    adj[0][0] = Poly::constant(nvars, Rational(1));
    return adj;
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::vector<std::vector<Poly>> minor;
      minor.reserve(n - 1);
      for (int rr = 0; rr < n; ++rr) {
        if (rr == r) continue;
        std::vector<Poly> row;
        row.reserve(n - 1);
        for (int cc = 0; cc < n; ++cc)
          if (cc != c) row.push_back(M[rr][cc]);
        minor.push_back(std::move(row));
      }
      Poly cof = poly_det(minor, nvars);
      if ((r + c) % 2 == 1) cof = -cof;
      adj[c][r] = std::move(cof);  // adjugate is the transposed cofactor matrix
    }
  }
  return adj;
}

CriticalSystem build_critical_system(const ConstrainedProblem& P, const Chart& chart) {
  const int d = P.dim();
  const int m = static_cast<int>(chart.dependent.size());
  const int n = static_cast<int>(chart.independent.size());
  CriticalSystem sys;
  sys.chart = chart;

  std::vector<std::vector<Poly>> a(m, std::vector<Poly>(m, Poly(d)));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a[r][c] = P.constraints[r].differentiate(chart.dependent[c]);
  sys.minor_det = poly_det(a, d);
  const auto adj = poly_adjugate(a, d);

  for (int i = 0; i < n; ++i) {
    const int ui = chart.independent[i];
    Poly eq = sys.minor_det * P.objective.differentiate(ui);
    for (int g = 0; g < m; ++g) {
      const Poly f_dep = P.objective.differentiate(chart.dependent[g]);
      if (f_dep.is_zero()) continue;
      for (int alpha = 0; alpha < m; ++alpha) {
        if (adj[g][alpha].is_zero()) continue;
        eq -= f_dep * adj[g][alpha] * P.constraints[alpha].differentiate(ui);
      }
    }
    sys.equations.push_back(std::move(eq));
  }
  for (int alpha = 0; alpha < m; ++alpha) sys.equations.push_back(P.constraints[alpha]);
  return sys;
}

// ---------------------------------------------------------------------------
// Extended jet ring.

namespace detail {

class JetSpace {
 public:
  JetSpace(const ConstrainedProblem& P, Chart chart)
      : prob_(&P),
        chart_(std::move(chart)),
        d_(P.dim()),
        n_(static_cast<int>(chart_.independent.size())),
        m_(static_cast<int>(chart_.dependent.size())),
        ring_vars_(P.dim()) {
    dep_pos_.assign(d_, -1);
    for (int g = 0; g < m_; ++g) dep_pos_[chart_.dependent[g]] = g;
  }

  int ring_vars() const { return ring_vars_; }
  int dim() const { return d_; }
  int n() const { return n_; }
  int m() const { return m_; }

  int symbol(int g, const Monomial& e) {
    const auto key = std::make_pair(g, e);
    auto it = sym_index_.find(key);
    if (it != sym_index_.end()) return it->second;
    const int idx = ring_vars_++;
    sym_index_.emplace(key, idx);
    sym_list_.push_back({g, e});
    return idx;
  }

  int find_symbol(int g, const Monomial& e) const {
    auto it = sym_index_.find(std::make_pair(g, e));
    return it == sym_index_.end() ? -1 : it->second;
  }

  struct SymInfo {
    int g;
    Monomial e;
  };
  const std::vector<SymInfo>& symbols() const { return sym_list_; }

  // Total derivative along the u_pos-th independent variable: ambient
  // dependent variables differentiate to first-order h symbols, h symbols to
  // the next-order ones.
  Poly total_derivative(const Poly& p, int u_pos) {
    const int amb_i = chart_.independent[u_pos];
    // Pre-create every symbol the derivative can touch so the ring stops
    // growing before monomials are assembled.
    std::vector<char> support(p.nvars(), 0);
    for (const auto& [mono, c] : p.terms())
      for (int v = 0; v < p.nvars(); ++v)
        if (mono[v] > 0) support[v] = 1;
    for (int v = 0; v < p.nvars(); ++v) {
      if (!support[v]) continue;
      if (v < d_) {
        if (dep_pos_[v] >= 0) symbol(dep_pos_[v], unit(u_pos));
      } else {
        const SymInfo& s = sym_list_[v - d_];
        Monomial next = s.e;
        next[u_pos] += 1;
        symbol(s.g, next);
      }
    }
    const int R = ring_vars_;
    const Poly pw = p.widened(R);
    Poly out(R);
    for (const auto& [mono, c] : pw.terms()) {
      for (int v = 0; v < pw.nvars(); ++v) {
        if (mono[v] == 0) continue;
        const Rational factor = c * Rational(mono[v]);
        Monomial base = mono;
        base[v] -= 1;
        if (v < d_) {
          if (v == amb_i) {
            out.add_term(base, factor);
          } else if (dep_pos_[v] >= 0) {
            base[symbol(dep_pos_[v], unit(u_pos))] += 1;
            out.add_term(base, factor);
          }
          // other ambient independents: derivative zero
        } else {
          const SymInfo& s = sym_list_[v - d_];
          Monomial next = s.e;
          next[u_pos] += 1;
          base[symbol(s.g, next)] += 1;
          out.add_term(base, factor);
        }
      }
    }
    return out;
  }

  const std::vector<Poly>& K_derivs(const Monomial& e) {
    auto it = k_cache_.find(e);
    if (it != k_cache_.end()) return it->second;
    std::vector<Poly> polys;
    if (monomial_degree(e) == 0) {
      for (const auto& g : prob_->constraints) polys.push_back(g);
    } else {
      const int j = first_nonzero(e);
      Monomial parent = e;
      parent[j] -= 1;
      const auto& base = K_derivs(parent);
      // base reference stays valid across map inserts; copy defensively since
      // total_derivative can recurse through symbol creation only (no cache writes).
      polys.reserve(base.size());
      for (const auto& kp : base) polys.push_back(total_derivative(kp, j));
    }
    return k_cache_.emplace(e, std::move(polys)).first->second;
  }

  const Poly& F_deriv(const Monomial& e) {
    auto it = f_cache_.find(e);
    if (it != f_cache_.end()) return it->second;
    Poly p(0);
    if (monomial_degree(e) == 0) {
      p = prob_->objective;
    } else {
      const int j = first_nonzero(e);
      Monomial parent = e;
      parent[j] -= 1;
      p = total_derivative(F_deriv(parent), j);
    }
    return f_cache_.emplace(e, std::move(p)).first->second;
  }

 private:
  Monomial unit(int pos) const { return unit_index(n_, pos); }

  const ConstrainedProblem* prob_;
  Chart chart_;
  int d_, n_, m_;
  int ring_vars_;
  std::vector<int> dep_pos_;
  std::map<std::pair<int, Monomial>, int> sym_index_;
  std::vector<SymInfo> sym_list_;
  std::map<Monomial, std::vector<Poly>> k_cache_;
  std::map<Monomial, Poly> f_cache_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// ImplicitJet

template <typename T>
ImplicitJet<T>::ImplicitJet(const ConstrainedProblem& P, const Chart& chart, std::vector<T> point,
                            int order, const Tolerances& tol)
    : prob_(&P), chart_(chart), point_(std::move(point)) {
  P.validate();
  const int d = P.dim();
  const int m = static_cast<int>(chart_.dependent.size());
  if (static_cast<int>(point_.size()) != d)
    throw std::invalid_argument("implicit_jet: point dimension mismatch");
  if (m != P.codim()) throw std::invalid_argument("implicit_jet: chart codimension mismatch");
  if (order < 0) throw std::invalid_argument("implicit_jet: negative order");

  // Constraint residual gate: exact when the point is rational.
  for (const auto& g : P.constraints) {
    T val = g.template evaluate<T>(std::span<const T>(point_));
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(val) > tol.constraint_tol * 10.0)
        throw std::runtime_error("implicit_jet: constraint residual too large");
    } else {
      if (sgn(val) != 0) throw std::runtime_error("implicit_jet: point not exactly feasible");
    }
  }

  space_ = std::make_unique<detail::JetSpace>(P, chart_);
  values_ = point_;

  minor_.assign(m * m, T(0));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      minor_[r * m + c] = P.constraints[r]
                              .differentiate(chart_.dependent[c])
                              .template evaluate<T>(std::span<const T>(point_));
  if (m > 0) {
    DenseSolver<T> s;
    s.factor(minor_, m);
    minor_inv_ = s.inverse();
  }
  extend(order);
}

template <typename T>
ImplicitJet<T>::~ImplicitJet() = default;
template <typename T>
ImplicitJet<T>::ImplicitJet(ImplicitJet&&) noexcept = default;
template <typename T>
ImplicitJet<T>& ImplicitJet<T>::operator=(ImplicitJet&&) noexcept = default;

template <typename T>
void ImplicitJet<T>::extend(int order) {
  for (int k = order_ + 1; k <= order; ++k) solve_order(k);
  order_ = std::max(order_, order);
}

template <typename T>
void ImplicitJet<T>::solve_order(int k) {
  const int n = space_->n();
  const int m = space_->m();
  if (m == 0) return;
  DenseSolver<T> s;
  s.factor(minor_, m);
  for (const auto& e : multi_indices(n, k)) {
    const auto& keqs = space_->K_derivs(e);
    values_.resize(space_->ring_vars(), T(0));
    std::vector<T> rhs(m, T(0));
    for (int a = 0; a < m; ++a) {
      const Poly kw = keqs[a].widened(space_->ring_vars());
      rhs[a] = -kw.template evaluate<T>(std::span<const T>(values_));
    }
    const auto h = s.solve(rhs);
    for (int g = 0; g < m; ++g) {
      const int idx = space_->find_symbol(g, e);
      if (idx >= 0) values_[idx] = h[g];
    }
  }
}

template <typename T>
T ImplicitJet<T>::h_value(int dep_pos, const Monomial& u_multi) const {
  if (static_cast<int>(monomial_degree(u_multi)) > order_)
    throw std::out_of_range("h_value: order not built");
  const int idx = space_->find_symbol(dep_pos, u_multi);
  if (idx < 0) return T(0);
  return values_[idx];
}

template <typename T>
T ImplicitJet<T>::reduced_partial(const Monomial& e) {
  const int k = static_cast<int>(monomial_degree(e));
  if (k > order_) throw std::out_of_range("reduced_partial: order not built");
  auto it = reduced_cache_.find(e);
  if (it != reduced_cache_.end()) return it->second;
  const Poly& fp = space_->F_deriv(e);
  // F_deriv only references symbols of order <= |e|, all already solved.
  std::vector<T> vals = values_;
  vals.resize(space_->ring_vars(), T(0));
  T v = fp.widened(space_->ring_vars()).template evaluate<T>(std::span<const T>(vals));
  reduced_cache_.emplace(e, v);
  return v;
}

template <typename T>
std::vector<T> ImplicitJet<T>::reduced_gradient() {
  const int n = reduced_dim();
  std::vector<T> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i) g.push_back(reduced_partial(unit_index(n, i)));
  return g;
}

template <typename T>
std::vector<T> ImplicitJet<T>::reduced_hessian() {
  const int n = reduced_dim();
  std::vector<T> h(n * n, T(0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Monomial e(n, 0u);
      e[i] += 1;
      e[j] += 1;
      T v = reduced_partial(e);
      h[i * n + j] = v;
      h[j * n + i] = v;
    }
  }
  return h;
}

template <typename T>
std::map<Monomial, T> ImplicitJet<T>::reduced_tensor(int r) {
  const int n = reduced_dim();
  std::map<Monomial, T> out;
  for (const auto& e : multi_indices(n, r)) out.emplace(e, reduced_partial(e));
  return out;
}

template class ImplicitJet<double>;
template class ImplicitJet<Rational>;

}  // namespace critex
