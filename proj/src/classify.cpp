#include "critex/classify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace critex {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::StrictMin: return "StrictMin";
    case Verdict::StrictMax: return "StrictMax";
    case Verdict::Saddle: return "Saddle";
    case Verdict::NonStrictMin: return "NonStrictMin";
    case Verdict::NonStrictMax: return "NonStrictMax";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

SubsidiaryProblem make_sphere_problem(int dim, Poly objective) {
  SubsidiaryProblem s;
  s.dim = dim;
  s.objective = std::move(objective);
  Poly sphere(dim);
  for (int v = 0; v < dim; ++v) {
    Monomial sq(dim, 0u);
    sq[v] = 2;
    sphere.add_term(sq, Rational(1));
  }
  sphere.add_term(Monomial(dim, 0u), Rational(-1));
  s.constraints.push_back(std::move(sphere));
  s.constraint_labels.push_back("sphere");
  return s;
}

std::vector<Poly> reexpress_degenerate(const Poly& constraint, bool* incomplete) {
  if (incomplete) *incomplete = false;
  Poly p = constraint;
  bool changed = false;
  while (auto pp = perfect_power(p)) {
    p = std::move(pp->root);
    changed = true;
  }
  if (auto split = sum_of_even_powers_split(p)) return *split;
  if (!changed && incomplete) *incomplete = true;
  return {p};
}

namespace {

std::vector<std::string> generic_names(int dim) {
  std::vector<std::string> names;
  names.reserve(dim);
  for (int v = 0; v < dim; ++v) names.push_back("y" + std::to_string(v + 1));
  return names;
}

Poly restrict_zero(const Poly& p, const std::set<int>& zero_vars) {
  Poly out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    bool killed = false;
    for (int v : zero_vars)
      if (m[v] > 0) {
        killed = true;
        break;
      }
    if (!killed) out.add_term(m, c);
  }
  return out;
}

bool contains_poly(const std::vector<Poly>& list, const Poly& p) {
  const Poly neg = -p;
  for (const auto& q : list)
    if (q == p || q == neg) return true;
  return false;
}

Rational exponent_factorial(const Monomial& e) {
  Rational f(1);
  for (unsigned ev : e)
    for (unsigned i = 2; i <= ev; ++i) f *= Rational(i);
  return f;
}

}  // namespace

namespace {

// Variables already pinned to zero by single-variable constraints.
std::set<int> coordinate_zero_vars(const std::vector<Poly>& constraints) {
  std::set<int> zeros;
  for (const auto& c : constraints) {
    if (c.terms().size() != 1) continue;
    const auto& [m, coef] = *c.terms().begin();
    int var = -1;
    bool pure = true;
    for (int v = 0; v < c.nvars(); ++v) {
      if (m[v] == 1 && var < 0)
        var = v;
      else if (m[v] != 0)
        pure = false;
    }
    if (pure && var >= 0) zeros.insert(var);
  }
  return zeros;
}

}  // namespace

SubsidiaryProblem zero_set_descent(const SubsidiaryProblem& prev, const Poly& vanished_objective,
                                   const Poly& next_objective) {
  SubsidiaryProblem out = prev;
  out.objective = next_objective;
  bool incomplete = false;
  // On the current variety the coordinate-zero variables drop out; restricting
  // first lets the radical/split rules fire (e.g. z^6 + x^2 z^4 on {x=0}).
  Poly vanished = vanished_objective;
  const auto pinned = coordinate_zero_vars(prev.constraints);
  if (!pinned.empty()) {
    Poly restricted = restrict_zero(vanished, pinned);
    if (!restricted.is_zero()) vanished = std::move(restricted);
  }
  const auto adds = reexpress_degenerate(vanished, &incomplete);
  out.descent_incomplete = out.descent_incomplete || incomplete;

  // Coordinate hyperplanes make earlier constraints that live entirely inside
  // them redundant; prune so the system stays square-solvable.
  const std::set<int> zero_vars = coordinate_zero_vars(adds);
  if (!zero_vars.empty()) {
    std::vector<Poly> kept{out.constraints.front()};
    std::vector<std::string> kept_labels{out.constraint_labels.front()};
    for (size_t i = 1; i < out.constraints.size(); ++i) {
      if (restrict_zero(out.constraints[i], zero_vars).is_zero()) continue;
      kept.push_back(out.constraints[i]);
      kept_labels.push_back(out.constraint_labels[i]);
    }
    out.constraints = std::move(kept);
    out.constraint_labels = std::move(kept_labels);
  }
  const auto names = generic_names(prev.dim);
  for (const auto& a : adds) {
    if (contains_poly(out.constraints, a)) continue;
    out.constraints.push_back(a);
    out.constraint_labels.push_back(a.to_string(names) + " = 0");
  }
  return out;
}

IntervalImage solve_subsidiary(const SubsidiaryProblem& S, const ClassifyConfig& cfg) {
  if (S.constraints.empty()) throw std::invalid_argument("solve_subsidiary: missing sphere");
  if (static_cast<int>(S.constraints.size()) > S.dim)
    throw std::runtime_error("solve_subsidiary: variety is overdetermined");
  ConstrainedProblem sub;
  sub.var_names = generic_names(S.dim);
  sub.objective = S.objective;
  sub.constraints = S.constraints;

  SearchConfig scfg = SearchConfig::cube(S.dim, 1.15, cfg.subsidiary_seeds_per_axis);
  scfg.max_total_seeds = cfg.subsidiary_max_seeds;
  scfg.tol = cfg.tol;
  scfg.parallel = cfg.parallel;
  const SolveResult res = find_critical_points(sub, scfg);
  if (res.points.empty())
    throw std::runtime_error(
        "solve_subsidiary: no real critical points found (search-coverage failure)");

  IntervalImage img;
  std::vector<Witness> all;
  for (const auto& cp : res.points) {
    Witness w;
    w.x = cp.x;
    w.exact = cp.exact;
    w.x_exact = cp.x_exact;
    w.on_family = cp.family_flag;
    if (cp.exact) {
      w.value_exact = S.objective.evaluate<Rational>(cp.x_exact);
      w.value = to_double(w.value_exact);
    } else {
      w.value = S.objective.evaluate<double>(cp.x);
    }
    all.push_back(std::move(w));
  }
  for (const auto& fam : res.families) {
    for (const auto& s : fam.samples) {
      Witness w;
      w.x = s.x;
      w.on_family = true;
      w.value = S.objective.evaluate<double>(s.x);
      all.push_back(std::move(w));
    }
  }

  img.lo = all.front().value;
  img.hi = all.front().value;
  for (const auto& w : all) {
    img.lo = std::min(img.lo, w.value);
    img.hi = std::max(img.hi, w.value);
  }
  const double wtol = cfg.tol.value_tol * (1.0 + std::max(std::abs(img.lo), std::abs(img.hi)));

  auto push_capped = [](std::vector<Witness>& dst, const Witness& w, size_t cap) {
    if (dst.size() < cap)
      dst.push_back(w);
    else if (w.exact) {
      for (auto& existing : dst)
        if (!existing.exact) {
          existing = w;
          break;
        }
    }
  };
  for (const auto& w : all) {
    if (w.value <= img.lo + wtol) push_capped(img.minimizers, w, 32);
    if (w.value >= img.hi - wtol) push_capped(img.maximizers, w, 32);
    const bool zero = (S.objective_exact && w.exact) ? sgn(w.value_exact) == 0
                                                     : std::abs(w.value) <= wtol;
    if (zero) {
      if (w.on_family) {
        push_capped(img.zeros.family_samples, w, 64);
        img.zeros.has_family = true;
      } else {
        push_capped(img.zeros.isolated, w, 64);
      }
    }
  }
  for (const auto& w : img.minimizers)
    if (S.objective_exact && w.exact && (!img.lo_exact || w.value_exact < img.lo_q)) {
      img.lo_exact = true;
      img.lo_q = w.value_exact;
    }
  for (const auto& w : img.maximizers)
    if (S.objective_exact && w.exact && (!img.hi_exact || w.value_exact > img.hi_q)) {
      img.hi_exact = true;
      img.hi_q = w.value_exact;
    }
  // Exact endpoints take over when they agree with the observed extreme.
  if (img.lo_exact && std::abs(to_double(img.lo_q) - img.lo) <= wtol) img.lo = to_double(img.lo_q);
  else img.lo_exact = false;
  if (img.hi_exact && std::abs(to_double(img.hi_q) - img.hi) <= wtol) img.hi = to_double(img.hi_q);
  else img.hi_exact = false;
  return img;
}

Classification second_derivative_test(const std::vector<double>& hessian, int n,
                                      const Tolerances& tol) {
  if (static_cast<int>(hessian.size()) != n * n)
    throw std::invalid_argument("second_derivative_test: bad Hessian size");
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = hessian[i * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd evs = es.eigenvalues();

  Classification out;
  EvidenceStep step;
  step.stage = "hessian";
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    step.eigenvalues.push_back(evs(i));
    radius = std::max(radius, std::abs(evs(i)));
  }
  const double eff = tol.eig_tol * (1.0 + radius);
  int pos = 0, neg = 0;
  for (int i = 0; i < n; ++i) {
    if (evs(i) > eff) ++pos;
    if (evs(i) < -eff) ++neg;
  }
  if (pos == n) {
    out.verdict = Verdict::StrictMin;
  } else if (neg == n) {
    out.verdict = Verdict::StrictMax;
  } else if (pos > 0 && neg > 0) {
    out.verdict = Verdict::Saddle;
  } else {
    out.verdict = Verdict::Indeterminate;
    out.reason = "hessian has eigenvalues inside the tolerance band";
    step.notes.push_back("escalate to higher derivative test");
  }
  out.evidence.push_back(std::move(step));
  return out;
}

// --- TaylorSource --------------------------------------------------------------

TaylorSource TaylorSource::from_polynomial(const Poly& f, std::span<const Rational> center,
                                           int k_max, bool center_exact) {
  TaylorSource src;
  src.dim_ = f.nvars();
  src.exhaustive_ = true;
  src.exact_ = center_exact;
  const int deg = std::max(f.total_degree(), 1);
  src.max_degree_ = deg;
  (void)k_max;
  auto comps = std::make_shared<std::map<int, HomogeneousPoly>>();
  for (auto& c : taylor_components(f, center, deg)) {
    c.exact = center_exact;
    comps->emplace(c.degree, std::move(c));
  }
  const int dim = src.dim_;
  src.compute_ = [comps, dim, center_exact](int k) -> HomogeneousPoly {
    auto it = comps->find(k);
    if (it != comps->end()) return it->second;
    return HomogeneousPoly{k, Poly(dim), center_exact};
  };
  return src;
}

TaylorSource TaylorSource::from_reduced(const ConstrainedProblem& P, const Chart& chart,
                                        const CriticalPoint& cp, int k_max, const Tolerances& tol) {
  TaylorSource src;
  src.dim_ = P.manifold_dim();
  src.exhaustive_ = false;
  src.exact_ = cp.exact;
  src.max_degree_ = k_max;
  const int n = src.dim_;
  if (cp.exact) {
    auto jet = std::make_shared<JetQ>(P, chart, cp.x_exact, 1, tol);
    src.compute_ = [jet, n](int k) -> HomogeneousPoly {
      jet->extend(k);
      Poly p(n);
      for (auto& [e, val] : jet->reduced_tensor(k))
        if (sgn(val) != 0) p.add_term(e, val / exponent_factorial(e));
      return HomogeneousPoly{k, std::move(p), true};
    };
  } else {
    auto jet = std::make_shared<JetD>(P, chart, cp.x, 1, tol);
    src.compute_ = [jet, n](int k) -> HomogeneousPoly {
      jet->extend(k);
      Poly p(n);
      for (auto& [e, val] : jet->reduced_tensor(k))
        p.add_term(e, rational_from_double(val) / exponent_factorial(e));
      return HomogeneousPoly{k, std::move(p), false};
    };
  }
  return src;
}

const HomogeneousPoly& TaylorSource::component(int k) {
  if (k < 0) throw std::invalid_argument("TaylorSource::component: negative degree");
  if (static_cast<size_t>(k) >= cache_.size()) cache_.resize(k + 1);
  if (!cache_[k]) {
    if (k > max_degree_ && exhaustive_)
      cache_[k] = HomogeneousPoly{k, Poly(dim_), exact_};
    else if (k > max_degree_)
      throw std::out_of_range("TaylorSource::component: beyond k_max");
    else
      cache_[k] = compute_(k);
  }
  return *cache_[k];
}

// --- higher derivative test ----------------------------------------------------

namespace {

// Numeric zero test for an inexact component, relative to the largest
// coefficient seen so far across degrees.
struct CoeffScale {
  double max_abs = 0.0;
  void absorb(const HomogeneousPoly& h) {
    for (const auto& [m, c] : h.p.terms()) max_abs = std::max(max_abs, std::abs(to_double(c)));
  }
};

bool component_is_zero(const HomogeneousPoly& h, const CoeffScale& scale, const Tolerances& tol) {
  if (h.p.is_zero()) return true;
  if (h.exact) return false;
  double mx = 0.0;
  for (const auto& [m, c] : h.p.terms()) mx = std::max(mx, std::abs(to_double(c)));
  return mx <= tol.value_tol * (1.0 + scale.max_abs);
}

// Newton projection of pseudo-random ambient points onto the variety, used as
// a cross-check that a component really vanishes there (heuristic; flagged).
double sampled_abs_max(const std::vector<Poly>& constraints, const Poly& objective, int dim,
                       int samples, const Tolerances& tol) {
  if (static_cast<int>(constraints.size()) >= dim) return 0.0;
  std::mt19937 rng(987654321u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int m = static_cast<int>(constraints.size());
  double worst = 0.0;
  int kept = 0;
  for (int trial = 0; trial < samples * 4 && kept < samples; ++trial) {
    Eigen::VectorXd x(dim);
    double norm = 0.0;
    for (int v = 0; v < dim; ++v) {
      x(v) = gauss(rng);
      norm += x(v) * x(v);
    }
    if (norm < 1e-12) continue;
    x /= std::sqrt(norm);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd g(m);
      Eigen::MatrixXd J(m, dim);
      std::vector<double> xv(x.data(), x.data() + dim);
      double gmax = 0.0;
      for (int a = 0; a < m; ++a) {
        g(a) = constraints[a].evaluate<double>(xv);
        gmax = std::max(gmax, std::abs(g(a)));
        for (int v = 0; v < dim; ++v) J(a, v) = constraints[a].differentiate(v).evaluate<double>(xv);
      }
      if (gmax <= 1e-11) {
        ok = true;
        break;
      }
      Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(-g);
      if (!dx.allFinite() || dx.norm() > 10.0) break;
      x += dx;
      if (x.norm() > 10.0) break;
    }
    if (!ok) continue;
    ++kept;
    std::vector<double> xv(x.data(), x.data() + dim);
    worst = std::max(worst, std::abs(objective.evaluate<double>(xv)));
  }
  (void)tol;
  return worst;
}

struct ChainState {
  SubsidiaryProblem variety;  // manifold-mode variety (sphere + appended sets)
  std::vector<Witness> isolated;
  bool isolated_mode = false;
  int depth = 0;
  bool used_sampling = false;
};

class HigherEngine {
 public:
  HigherEngine(TaylorSource& src, const ClassifyConfig& cfg) : src_(src), cfg_(cfg) {
    limit_ = src.exhaustive() ? src.max_degree() : cfg.k_max;
  }

  Classification run() {
    const int d = src_.dim();
    if (d < 1) return indet("empty reduced space");
    scale_.absorb(src_.component(1));
    if (!component_is_zero(src_.component(1), scale_, cfg_.tol))
      throw std::invalid_argument("higher_derivative_test: point is not critical");

    int k = 0;
    for (int cand = 2; cand <= limit_; ++cand) {
      scale_.absorb(src_.component(cand));
      if (!component_is_zero(src_.component(cand), scale_, cfg_.tol)) {
        k = cand;
        break;
      }
    }
    if (k == 0) {
      if (src_.exhaustive()) return indet("all Taylor components vanish (locally constant)");
      return indet("flat to order k_max");
    }

    const HomogeneousPoly& pk = src_.component(k);
    if (k % 2 == 1) {
      EvidenceStep step;
      step.stage = "P_k";
      step.degree = k;
      step.case_label = "odd";
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }

    SubsidiaryProblem sphere = make_sphere_problem(d, pk.p);
    sphere.objective_exact = pk.exact;
    IntervalImage img;
    try {
      img = solve_subsidiary(sphere, cfg_);
    } catch (const std::runtime_error& e) {
      EvidenceStep fail;
      fail.stage = "P_k";
      fail.degree = k;
      fail.notes.push_back(e.what());
      out_.evidence.push_back(std::move(fail));
      return indet("subsidiary solve failed on the sphere");
    }
    const double tolv = cfg_.tol.value_tol * (1.0 + std::max(std::abs(img.lo), std::abs(img.hi)));
    const bool a0 = endpoint_zero(img.minimizers, img.lo, pk.exact, tolv);
    const bool b0 = endpoint_zero(img.maximizers, img.hi, pk.exact, tolv);

    EvidenceStep step;
    step.stage = "P_k";
    step.degree = k;
    step.lo = img.lo;
    step.hi = img.hi;
    step.active_constraints = sphere.constraint_labels;

    if (!a0 && img.lo > 0) {
      step.case_label = "c1";
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::StrictMin;
      return out_;
    }
    if (!b0 && img.hi < 0) {
      step.case_label = "c2";
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::StrictMax;
      return out_;
    }
    if (!a0 && !b0 && img.lo < 0 && img.hi > 0) {
      step.case_label = "c3";
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }
    if (a0 && b0) {
      step.case_label = "degenerate";
      out_.evidence.push_back(std::move(step));
      return indet("component image numerically zero on the whole sphere");
    }

    const bool mirror = b0;  // a < b = 0: maximum candidate
    step.case_label = mirror ? "c5" : "c4";
    out_.evidence.push_back(std::move(step));

    ChainState st;
    st.variety = zero_set_descent(sphere, pk.p, Poly(d));
    const auto& zeros = img.zeros;
    if (!zeros.has_family && !zeros.isolated.empty()) {
      st.isolated_mode = true;
      st.isolated = zeros.isolated;
    }
    return chain(std::move(st), k, mirror, pk.exact);
  }

 private:
  Classification indet(std::string reason) {
    out_.verdict = Verdict::Indeterminate;
    out_.reason = std::move(reason);
    return out_;
  }

  bool endpoint_zero(const std::vector<Witness>& ws, double endpoint, bool comp_exact,
                     double tolv) const {
    bool all_exact = !ws.empty();
    for (const auto& w : ws) {
      if (w.exact && comp_exact && sgn(w.value_exact) == 0) return true;
      if (!w.exact) all_exact = false;
    }
    if (comp_exact && all_exact) return false;  // decided exactly: endpoint nonzero
    return std::abs(endpoint) <= tolv;
  }

  std::string chain_label(bool mirror, int sub) const {
    return (mirror ? "c5" : "c4") + std::to_string(sub);
  }

  Verdict strict_min(bool mirror) const { return mirror ? Verdict::StrictMax : Verdict::StrictMin; }
  Verdict nonstrict_min(bool mirror) const {
    return mirror ? Verdict::NonStrictMax : Verdict::NonStrictMin;
  }

  Classification chain(ChainState st, int k, bool mirror, bool exact_chain) {
    bool heuristic_vanish = false;
    for (int l = k + 1; l <= limit_; ++l) {
      const HomogeneousPoly& cl = src_.component(l);
      scale_.absorb(cl);
      if (component_is_zero(cl, scale_, cfg_.tol)) continue;
      // Work in the minimum-candidate orientation.
      const Poly pl = mirror ? -cl.p : cl.p;
      const bool comp_exact = cl.exact && exact_chain;

      if (st.isolated_mode) {
        auto res = isolated_step(st, pl, l, comp_exact, mirror);
        if (res) return *res;
        if (st.isolated.empty()) break;  // zero set exhausted
        continue;
      }

      auto res = manifold_step(st, pl, l, comp_exact, mirror, heuristic_vanish);
      if (res) return *res;
      if (st.depth > cfg_.depth_max) return indet("depth_max exceeded during descent");
    }

    // c41 / c51: nothing decisive left on the zero set.
    EvidenceStep step;
    step.stage = "P_k";
    step.degree = limit_;
    step.case_label = chain_label(mirror, 1);
    if (!src_.exhaustive()) step.notes.push_back("components examined up to k_max only (heuristic)");
    if (heuristic_vanish || st.used_sampling)
      step.notes.push_back("vanishing checked by subsidiary solve + sampling (heuristic)");
    if (st.variety.descent_incomplete) step.notes.push_back("re-expression incomplete");
    step.active_constraints = st.variety.constraint_labels;
    out_.evidence.push_back(std::move(step));
    out_.verdict = nonstrict_min(mirror);
    return out_;
  }

  // Evaluate P_l at the isolated zero witnesses directly.
  std::optional<Classification> isolated_step(ChainState& st, const Poly& pl, int l,
                                              bool comp_exact, bool mirror) {
    std::vector<double> vals;
    std::vector<int> exact_sign(st.isolated.size(), 2);  // 2 = unknown
    double vmax = 0.0;
    for (size_t i = 0; i < st.isolated.size(); ++i) {
      const Witness& w = st.isolated[i];
      double v;
      if (w.exact) {
        const Rational vq = pl.evaluate<Rational>(w.x_exact);
        v = to_double(vq);
        if (comp_exact) exact_sign[i] = sgn(vq);
      } else {
        v = pl.evaluate<double>(w.x);
      }
      vals.push_back(v);
      vmax = std::max(vmax, std::abs(v));
    }
    const double tolv = cfg_.tol.value_tol * (1.0 + vmax);
    auto is_zero = [&](size_t i) {
      if (exact_sign[i] != 2) return exact_sign[i] == 0;
      return std::abs(vals[i]) <= tolv;
    };
    auto is_neg = [&](size_t i) {
      if (exact_sign[i] != 2) return exact_sign[i] < 0;
      return vals[i] < -tolv;
    };

    bool all_zero = true, any_neg = false, any_zero = false;
    for (size_t i = 0; i < st.isolated.size(); ++i) {
      if (!is_zero(i)) all_zero = false;
      if (is_neg(i)) any_neg = true;
      if (is_zero(i)) any_zero = true;
    }
    if (all_zero) return std::nullopt;  // vanishes on the zero set; next component

    EvidenceStep step;
    step.stage = "P_k";
    step.degree = l;
    step.lo = *std::min_element(vals.begin(), vals.end());
    step.hi = *std::max_element(vals.begin(), vals.end());
    if (mirror) {
      std::swap(step.lo, step.hi);
      step.lo = -step.lo;
      step.hi = -step.hi;
    }
    step.notes.push_back("evaluated at isolated zero witnesses");
    step.active_constraints = st.variety.constraint_labels;

    if (l % 2 == 1) {
      step.case_label = chain_label(mirror, 2);
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }
    if (any_neg) {
      step.case_label = chain_label(mirror, 4);
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }
    if (!any_zero) {
      step.case_label = chain_label(mirror, 3);
      out_.evidence.push_back(std::move(step));
      out_.verdict = strict_min(mirror);
      return out_;
    }
    // c45: keep only the witnesses where P_l vanishes and continue.
    step.case_label = chain_label(mirror, 5);
    out_.evidence.push_back(std::move(step));
    std::vector<Witness> next;
    for (size_t i = 0; i < st.isolated.size(); ++i)
      if (is_zero(i)) next.push_back(st.isolated[i]);
    st.isolated = std::move(next);
    st.depth += 1;
    if (st.depth > cfg_.depth_max) return indet("depth_max exceeded during descent");
    return std::nullopt;
  }

  std::optional<Classification> manifold_step(ChainState& st, const Poly& pl, int l,
                                              bool comp_exact, bool mirror,
                                              bool& heuristic_vanish) {
    SubsidiaryProblem sub = st.variety;
    sub.objective = pl;
    sub.objective_exact = comp_exact;
    IntervalImage img;
    try {
      img = solve_subsidiary(sub, cfg_);
    } catch (const std::runtime_error& e) {
      EvidenceStep fail;
      fail.stage = "P_k";
      fail.degree = l;
      fail.active_constraints = st.variety.constraint_labels;
      fail.notes.push_back(e.what());
      if (st.variety.descent_incomplete) fail.notes.push_back("re-expression incomplete");
      out_.evidence.push_back(std::move(fail));
      return indet("subsidiary solve failed during descent");
    }
    double sample_mx = 0.0;
    if (!comp_exact || !img.lo_exact || !img.hi_exact) {
      sample_mx = sampled_abs_max(sub.constraints, pl, sub.dim, cfg_.vanish_samples, cfg_.tol);
      st.used_sampling = true;
    }
    const double tolv =
        cfg_.tol.value_tol * (1.0 + std::max({std::abs(img.lo), std::abs(img.hi), sample_mx}));
    const bool a0 = endpoint_zero(img.minimizers, img.lo, comp_exact, tolv);
    const bool b0 = endpoint_zero(img.maximizers, img.hi, comp_exact, tolv);
    const bool vanishes = a0 && b0 && sample_mx <= tolv;
    if (vanishes) {
      heuristic_vanish = heuristic_vanish || !comp_exact || st.used_sampling;
      return std::nullopt;
    }

    EvidenceStep step;
    step.stage = "P_k";
    step.degree = l;
    step.lo = mirror ? -img.hi : img.lo;
    step.hi = mirror ? -img.lo : img.hi;
    step.active_constraints = st.variety.constraint_labels;
    if (st.variety.descent_incomplete) step.notes.push_back("re-expression incomplete");

    if (l % 2 == 1) {
      step.case_label = chain_label(mirror, 2);
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }
    if (!a0 && img.lo < 0) {
      step.case_label = chain_label(mirror, 4);
      out_.evidence.push_back(std::move(step));
      out_.verdict = Verdict::Saddle;
      return out_;
    }
    if (!a0 && img.lo > 0) {
      step.case_label = chain_label(mirror, 3);
      out_.evidence.push_back(std::move(step));
      out_.verdict = strict_min(mirror);
      return out_;
    }
    // a == 0 < b: descend onto the zero set of P_l.
    step.case_label = chain_label(mirror, 5);
    out_.evidence.push_back(std::move(step));
    st.depth += 1;
    if (st.depth > cfg_.depth_max) return indet("depth_max exceeded during descent");
    st.variety = zero_set_descent(st.variety, pl, Poly(st.variety.dim));
    if (!img.zeros.has_family && !img.zeros.isolated.empty()) {
      st.isolated_mode = true;
      st.isolated = img.zeros.isolated;
    }
    return std::nullopt;
  }

  TaylorSource& src_;
  const ClassifyConfig& cfg_;
  Classification out_;
  CoeffScale scale_;
  int limit_;
};

}  // namespace

Classification higher_derivative_test(TaylorSource& src, const ClassifyConfig& cfg) {
  HigherEngine engine(src, cfg);
  return engine.run();
}

Classification classify_point(const ConstrainedProblem& P, const CriticalPoint& cp,
                              const ClassifyConfig& cfg) {
  P.validate();
  const int n = P.manifold_dim();
  if (n == 0) {
    Classification c;
    c.verdict = Verdict::Indeterminate;
    c.reason = "zero-dimensional constraint manifold";
    return c;
  }

  std::vector<double> H(n * n, 0.0);
  if (cp.exact) {
    JetQ jet(P, cp.chart, cp.x_exact, 2, cfg.tol);
    const auto hq = jet.reduced_hessian();
    for (int i = 0; i < n * n; ++i) H[i] = to_double(hq[i]);
  } else {
    JetD jet(P, cp.chart, cp.x, 2, cfg.tol);
    H = jet.reduced_hessian();
  }
  Classification hess = second_derivative_test(H, n, cfg.tol);
  if (hess.verdict != Verdict::Indeterminate) return hess;

  Classification full;
  if (P.codim() == 0) {
    std::vector<Rational> center;
    if (cp.exact) {
      center = cp.x_exact;
    } else {
      center.reserve(cp.x.size());
      for (double v : cp.x) center.push_back(rational_from_double(v));
    }
    TaylorSource src = TaylorSource::from_polynomial(P.objective, center, cfg.k_max, cp.exact);
    full = higher_derivative_test(src, cfg);
  } else {
    TaylorSource src = TaylorSource::from_reduced(P, cp.chart, cp, cfg.k_max, cfg.tol);
    full = higher_derivative_test(src, cfg);
  }
  full.evidence.insert(full.evidence.begin(), hess.evidence.begin(), hess.evidence.end());
  return full;
}

}  // namespace critex
