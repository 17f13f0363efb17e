#include "critex/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critex {

SearchConfig SearchConfig::cube(int dim, double half_width, int seeds) {
  SearchConfig cfg;
  cfg.box.assign(dim, {-half_width, half_width});
  cfg.seeds_per_axis = seeds;
  return cfg;
}

double SearchConfig::grid_spacing() const {
  double spacing = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : box)
    spacing = std::min(spacing, (hi - lo) / std::max(1, seeds_per_axis - 1));
  return spacing;
}

void SearchConfig::validate(int dim) const {
  if (static_cast<int>(box.size()) != dim)
    throw std::invalid_argument("SearchConfig: box size does not match dimension");
  for (const auto& [lo, hi] : box)
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("SearchConfig: box must be finite and nonempty");
  if (seeds_per_axis < 2) throw std::invalid_argument("SearchConfig: need >= 2 seeds per axis");
  if (tol.constraint_tol <= 0 || tol.gradient_tol <= 0 || tol.dedup_radius <= 0)
    throw std::invalid_argument("SearchConfig: tolerances must be positive");
}

// --- compiled evaluation -----------------------------------------------------

CompiledPoly CompiledPoly::from(const Poly& p) {
  CompiledPoly c;
  c.nvars = p.nvars();
  c.nterms = static_cast<int>(p.terms().size());
  c.coef.reserve(c.nterms);
  c.exps.reserve(static_cast<size_t>(c.nterms) * c.nvars);
  for (const auto& [m, q] : p.terms()) {
    c.coef.push_back(to_double(q));
    for (int v = 0; v < c.nvars; ++v) {
      c.exps.push_back(m[v]);
      c.max_exp = std::max(c.max_exp, m[v]);
    }
  }
  return c;
}

double CompiledPoly::eval(std::span<const double> pow_table, int stride) const {
  double acc = 0.0;
  const unsigned* e = exps.data();
  for (int t = 0; t < nterms; ++t, e += nvars) {
    double term = coef[t];
    for (int v = 0; v < nvars; ++v)
      if (e[v] != 0) term *= pow_table[v * stride + e[v]];
    acc += term;
  }
  return acc;
}

CompiledSystem CompiledSystem::compile(const CriticalSystem& sys, int dim) {
  CompiledSystem out;
  out.dim = dim;
  for (const auto& eq : sys.equations) {
    out.eqs.push_back(CompiledPoly::from(eq));
    out.max_exp = std::max(out.max_exp, out.eqs.back().max_exp);
    for (int v = 0; v < dim; ++v) {
      out.jac.push_back(CompiledPoly::from(eq.differentiate(v)));
      out.max_exp = std::max(out.max_exp, out.jac.back().max_exp);
    }
  }
  if (static_cast<int>(out.eqs.size()) != dim)
    throw std::invalid_argument("CompiledSystem: system is not square");
  return out;
}

void CompiledSystem::fill_pow_table(std::span<const double> x, std::vector<double>& table) const {
  const int stride = static_cast<int>(max_exp) + 1;
  table.resize(static_cast<size_t>(dim) * stride);
  for (int v = 0; v < dim; ++v) {
    table[v * stride] = 1.0;
    for (unsigned e = 1; e <= max_exp; ++e) table[v * stride + e] = table[v * stride + e - 1] * x[v];
  }
}

// --- Newton ------------------------------------------------------------------

NewtonOutcome newton_solve(const CompiledSystem& sys, std::span<const double> x0, int max_iter,
                           double escape_radius) {
  const int d = sys.dim;
  NewtonOutcome out;
  out.x.assign(x0.begin(), x0.end());
  const int stride = static_cast<int>(sys.max_exp) + 1;
  std::vector<double> pow_table;
  Eigen::MatrixXd J(d, d);
  Eigen::VectorXd F(d);

  auto residual_at = [&](const std::vector<double>& x) {
    sys.fill_pow_table(x, pow_table);
    double r = 0.0;
    for (int i = 0; i < d; ++i) r = std::max(r, std::abs(sys.eqs[i].eval(pow_table, stride)));
    return r;
  };

  Eigen::VectorXd prev_dx = Eigen::VectorXd::Zero(d);
  bool have_prev = false;

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    sys.fill_pow_table(out.x, pow_table);
    double fnorm = 0.0;
    for (int i = 0; i < d; ++i) {
      F(i) = sys.eqs[i].eval(pow_table, stride);
      fnorm = std::max(fnorm, std::abs(F(i)));
    }
    out.residual = fnorm;
    if (!std::isfinite(fnorm)) return out;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) J(i, j) = sys.jac[i * d + j].eval(pow_table, stride);

    Eigen::VectorXd dx(d);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    // Keep proper Newton running on merely ill-conditioned systems (flat
    // multiple roots need it); the damped fallback is reserved for exactly
    // degenerate pivots such as identically-zero rows on solution families.
    lu.setThreshold(1e-40);
    if (lu.isInvertible()) {
      dx = lu.solve(-F);
    } else {
      const double mu = 1e-10 * (J.cwiseAbs().maxCoeff() + 1.0);
      Eigen::MatrixXd JtJ = J.transpose() * J;
      JtJ.diagonal().array() += mu;
      dx = JtJ.ldlt().solve(-J.transpose() * F);
    }

    double step = 0.0, xnorm = 0.0;
    for (int i = 0; i < d; ++i) {
      out.x[i] += dx(i);
      step = std::max(step, std::abs(dx(i)));
      xnorm = std::max(xnorm, std::abs(out.x[i]));
    }
    if (!std::isfinite(step) || xnorm > escape_radius) return out;
    if (step <= 1e-13 * (1.0 + xnorm)) {
      out.residual = residual_at(out.x);
      out.converged = true;
      return out;
    }

    // Multiple roots converge only geometrically; when successive steps line
    // up with a stable ratio, extrapolate the tail (Aitken) and keep the jump
    // if it does not worsen the residual.
    if (have_prev && it >= 2) {
      const double n1 = prev_dx.norm(), n2 = dx.norm();
      if (n1 > 0.0 && n2 > 0.0) {
        const double cosang = prev_dx.dot(dx) / (n1 * n2);
        const double ratio = n2 / n1;
        if (cosang > 0.9 && ratio > 0.3 && ratio < 0.97) {
          std::vector<double> jumped(d);
          const double gain = ratio / (1.0 - ratio);
          for (int i = 0; i < d; ++i) jumped[i] = out.x[i] + dx(i) * gain;
          if (residual_at(jumped) <= out.residual) {
            out.x = std::move(jumped);
            have_prev = false;
            continue;
          }
        }
      }
    }
    prev_dx = dx;
    have_prev = true;
  }
  return out;
}

std::vector<NewtonOutcome> newton_sweep_serial(const CompiledSystem& sys,
                                               std::span<const double> seeds_flat, int max_iter,
                                               double escape_radius) {
  const int d = sys.dim;
  const long count = static_cast<long>(seeds_flat.size()) / d;
  std::vector<NewtonOutcome> out(count);
  for (long s = 0; s < count; ++s)
    out[s] = newton_solve(sys, seeds_flat.subspan(s * d, d), max_iter, escape_radius);
  return out;
}

std::vector<NewtonOutcome> newton_sweep_parallel(const CompiledSystem& sys,
                                                 std::span<const double> seeds_flat, int max_iter,
                                                 double escape_radius) {
  const int d = sys.dim;
  const long count = static_cast<long>(seeds_flat.size()) / d;
  std::vector<NewtonOutcome> out(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (long s = 0; s < count; ++s)
    out[s] = newton_solve(sys, seeds_flat.subspan(s * d, d), max_iter, escape_radius);
  return out;
}

std::vector<double> make_seed_grid(const SearchConfig& cfg, int dim) {
  int per_axis = cfg.seeds_per_axis;
  auto total = [&](int s) {
    double t = 1.0;
    for (int v = 0; v < dim; ++v) t *= s;
    return t;
  };
  while (per_axis > 2 && total(per_axis) > static_cast<double>(cfg.max_total_seeds)) --per_axis;
  std::vector<double> grid;
  std::vector<int> idx(dim, 0);
  const long count = static_cast<long>(total(per_axis));
  grid.reserve(count * dim);
  for (long s = 0; s < count; ++s) {
    for (int v = 0; v < dim; ++v) {
      const auto& [lo, hi] = cfg.box[v];
      grid.push_back(per_axis == 1 ? 0.5 * (lo + hi)
                                   : lo + (hi - lo) * idx[v] / (per_axis - 1));
    }
    for (int v = dim - 1; v >= 0; --v) {
      if (++idx[v] < per_axis) break;
      idx[v] = 0;
    }
  }
  return grid;
}

// --- search pipeline ---------------------------------------------------------

namespace {

double inf_dist(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Chart> all_charts(int dim, int m) {
  std::vector<Chart> charts;
  std::vector<int> pick(m);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == m) {
      charts.push_back(Chart::from_dependent(dim, std::vector<int>(pick.begin(), pick.end())));
      return;
    }
    for (int v = start; v < dim; ++v) {
      pick[depth] = v;
      self(self, v + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return charts;
}

bool inside_box(std::span<const double> x, const SearchConfig& cfg, double margin) {
  for (size_t v = 0; v < x.size(); ++v) {
    const auto& [lo, hi] = cfg.box[v];
    const double pad = margin * (hi - lo);
    if (x[v] < lo - pad || x[v] > hi + pad) return false;
  }
  return true;
}

// Snap all coordinates to small rationals and verify the symbolic critical
// system vanishes exactly; only then is the point marked exact. Degenerate
// (multiple) roots stall well above machine precision, so widening snap
// tolerances are tried for rank-deficient points; exact verification makes
// the wider rungs safe.
void try_snap_exact(CriticalPoint& cp, const ConstrainedProblem& P, const CriticalSystem& sys,
                    const Tolerances& tol, bool rank_deficient) {
  const int d = P.dim();
  std::vector<double> ladder = {tol.snap_tol, 1e-7, 3e-5};
  if (rank_deficient) ladder.push_back(2e-3);
  for (const double snap_tol : ladder) {
    std::vector<Rational> xq;
    xq.reserve(d);
    bool snapped = true;
    for (int v = 0; v < d && snapped; ++v) {
      auto q = snap_to_rational(cp.x[v], tol.snap_max_den, snap_tol);
      if (!q)
        snapped = false;
      else
        xq.push_back(*q);
    }
    if (!snapped) continue;
    bool verified = true;
    for (const auto& eq : sys.equations)
      if (sgn(eq.evaluate<Rational>(xq)) != 0) {
        verified = false;
        break;
      }
    if (!verified) continue;
    cp.x_exact = std::move(xq);
    cp.exact = true;
    for (int v = 0; v < d; ++v) cp.x[v] = to_double(cp.x_exact[v]);
    return;
  }
}

Eigen::MatrixXd system_jacobian_at(const CompiledSystem& sys, std::span<const double> x) {
  const int d = sys.dim;
  const int stride = static_cast<int>(sys.max_exp) + 1;
  std::vector<double> pow_table;
  sys.fill_pow_table(x, pow_table);
  Eigen::MatrixXd J(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) J(i, j) = sys.jac[i * d + j].eval(pow_table, stride);
  return J;
}

int system_rank_at(const CompiledSystem& sys, std::span<const double> x) {
  const Eigen::MatrixXd J = system_jacobian_at(sys, x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > std::max(1e-7 * smax, 1e-11)) ++rank;
  return rank;
}

// Residuals and rank diagnostics in the strongest valid chart.
bool finalize_diagnostics(CriticalPoint& cp, const ConstrainedProblem& P,
                          const std::vector<Chart>& charts,
                          const std::vector<CompiledSystem>& compiled, const SearchConfig& cfg) {
  const int d = P.dim();
  const auto valid = enumerate_charts(P, cp.x, cfg.tol.rank_tol);
  if (valid.empty()) return false;
  cp.chart = valid.front();

  double cres = 0.0;
  for (const auto& g : P.constraints)
    cres = std::max(cres, std::abs(g.evaluate<double>(cp.x)));
  cp.constraint_residual = cres;

  JetD jet(P, cp.chart, cp.x, 1, cfg.tol);
  cp.gradient_residual = inf_norm(jet.reduced_gradient());
  if (cp.constraint_residual > cfg.tol.constraint_tol || cp.gradient_residual > cfg.tol.gradient_tol)
    return false;

  size_t chart_idx = 0;
  for (; chart_idx < charts.size(); ++chart_idx)
    if (charts[chart_idx] == cp.chart) break;
  cp.system_rank = system_rank_at(compiled[chart_idx], cp.x);
  cp.system_size = d;
  return true;
}

std::vector<Eigen::VectorXd> null_directions(const Eigen::MatrixXd& J) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= std::max(1e-7 * smax, 1e-11)) dirs.push_back(svd.matrixV().col(i));
  return dirs;
}

}  // namespace

CriticalPoint refine(const ConstrainedProblem& P, const Chart& chart, std::span<const double> x0,
                     const SearchConfig& cfg) {
  P.validate();
  cfg.validate(P.dim());
  const CriticalSystem sys = build_critical_system(P, chart);
  const CompiledSystem compiled = CompiledSystem::compile(sys, P.dim());
  const double escape = 4.0 * (1.0 + inf_norm(x0)) + 4.0;
  NewtonOutcome out = newton_solve(compiled, x0, cfg.newton_max_iter, escape);
  if (!out.converged) throw std::runtime_error("refine: Newton did not converge");
  if (!chart_valid_at(P, chart, out.x, cfg.tol.rank_tol))
    throw std::runtime_error("refine: chart became invalid at the refined point");

  CriticalPoint cp;
  cp.x = out.x;
  cp.chart = chart;
  cp.system_rank = system_rank_at(compiled, cp.x);
  cp.system_size = P.dim();
  try_snap_exact(cp, P, sys, cfg.tol, cp.system_rank < P.dim());
  double cres = 0.0;
  for (const auto& g : P.constraints)
    cres = std::max(cres, std::abs(g.evaluate<double>(cp.x)));
  cp.constraint_residual = cres;
  JetD jet(P, chart, cp.x, 1, cfg.tol);
  cp.gradient_residual = inf_norm(jet.reduced_gradient());
  if (cp.constraint_residual > cfg.tol.constraint_tol || cp.gradient_residual > cfg.tol.gradient_tol)
    throw std::runtime_error("refine: residuals above tolerance");
  return cp;
}

void detect_family(SolveResult& result, const ConstrainedProblem& P, const SearchConfig& cfg) {
  const int d = P.dim();
  const double spacing = cfg.grid_spacing();
  const double step = std::max(cfg.family_step_scale * spacing, 8.0 * cfg.tol.dedup_radius);
  const double link_radius = 2.5 * step;
  const double escape = 4.0 * (1.0 + inf_norm(std::span<const double>(
                                   result.points.empty() ? std::vector<double>{0.0}
                                                         : result.points.front().x))) +
                        8.0;

  std::vector<int> candidates;
  for (size_t i = 0; i < result.points.size(); ++i)
    if (result.points[i].system_rank < result.points[i].system_size)
      candidates.push_back(static_cast<int>(i));
  if (candidates.empty()) return;

  // Per-candidate compiled system in its own chart.
  std::vector<std::vector<FamilySample>> clouds(candidates.size());
  std::vector<bool> confirmed(candidates.size(), false);
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    CriticalPoint& cp = result.points[candidates[ci]];
    const CriticalSystem sys = build_critical_system(P, cp.chart);
    const CompiledSystem compiled = CompiledSystem::compile(sys, d);
    const Eigen::MatrixXd J = system_jacobian_at(compiled, cp.x);
    auto dirs = null_directions(J);
    for (const auto& dir0 : dirs) {
      for (int sgn_dir : {+1, -1}) {
        Eigen::VectorXd dir = sgn_dir * dir0;
        Eigen::VectorXd cur = Eigen::Map<const Eigen::VectorXd>(cp.x.data(), d);
        for (int s = 0; s < cfg.family_arc_steps; ++s) {
          Eigen::VectorXd pred = cur + step * dir;
          std::vector<double> pred_v(pred.data(), pred.data() + d);
          NewtonOutcome corr = newton_solve(compiled, pred_v, cfg.newton_max_iter, escape);
          if (!corr.converged) break;
          Eigen::VectorXd corr_v = Eigen::Map<const Eigen::VectorXd>(corr.x.data(), d);
          const double moved = (corr_v - cur).norm();
          if (moved < 0.25 * step || moved > 4.0 * step) break;
          // Feasibility along the arc.
          double cres = 0.0;
          for (const auto& g : P.constraints)
            cres = std::max(cres, std::abs(g.evaluate<double>(corr.x)));
          if (cres > 100.0 * cfg.tol.constraint_tol) break;
          confirmed[ci] = true;
          FamilySample sample;
          sample.x = corr.x;
          // Re-align the tangent with the travel direction.
          auto next_dirs = null_directions(system_jacobian_at(compiled, corr.x));
          Eigen::VectorXd travel = (corr_v - cur).normalized();
          Eigen::VectorXd best = travel;
          double best_dot = -1.0;
          for (const auto& nd : next_dirs) {
            const double dot = std::abs(nd.dot(travel));
            if (dot > best_dot) {
              best_dot = dot;
              best = nd.dot(travel) >= 0 ? nd : Eigen::VectorXd(-nd);
            }
          }
          sample.tangent.assign(best.data(), best.data() + d);
          clouds[ci].push_back(std::move(sample));
          cur = corr_v;
          dir = best;
        }
      }
    }
  }

  // Union-find over confirmed candidates; clouds link components.
  std::vector<int> parent(candidates.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto close = [&](size_t a, size_t b) {
    const auto& pa = result.points[candidates[a]].x;
    const auto& pb = result.points[candidates[b]].x;
    if (inf_dist(pa, pb) <= link_radius) return true;
    for (const auto& s : clouds[a])
      if (inf_dist(s.x, pb) <= link_radius) return true;
    for (const auto& s : clouds[b])
      if (inf_dist(s.x, pa) <= link_radius) return true;
    for (const auto& sa : clouds[a])
      for (const auto& sb : clouds[b])
        if (inf_dist(sa.x, sb.x) <= link_radius) return true;
    return false;
  };
  for (size_t a = 0; a < candidates.size(); ++a) {
    if (!confirmed[a]) continue;
    for (size_t b = a + 1; b < candidates.size(); ++b) {
      if (!confirmed[b]) continue;
      if (find(static_cast<int>(a)) == find(static_cast<int>(b))) continue;
      if (close(a, b)) parent[find(static_cast<int>(a))] = find(static_cast<int>(b));
    }
  }

  std::map<int, Family> families;
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    if (!confirmed[ci]) continue;
    const int root = find(static_cast<int>(ci));
    Family& fam = families[root];
    fam.members.push_back(candidates[ci]);
    for (auto& s : clouds[ci]) fam.samples.push_back(std::move(s));
  }
  int next_id = 0;
  for (auto& [root, fam] : families) {
    fam.id = next_id++;
    std::sort(fam.members.begin(), fam.members.end());
    for (int member : fam.members) {
      result.points[member].family_flag = true;
      result.points[member].family_id = fam.id;
    }
    result.families.push_back(std::move(fam));
  }
}

SolveResult find_critical_points(const ConstrainedProblem& P, const SearchConfig& cfg) {
  P.validate();
  const int d = P.dim();
  const int m = P.codim();
  cfg.validate(d);

  const std::vector<Chart> charts = all_charts(d, m);
  std::vector<CompiledSystem> compiled;
  std::vector<CriticalSystem> systems;
  compiled.reserve(charts.size());
  systems.reserve(charts.size());
  for (const auto& c : charts) {
    systems.push_back(build_critical_system(P, c));
    compiled.push_back(CompiledSystem::compile(systems.back(), d));
  }

  const std::vector<double> seeds = make_seed_grid(cfg, d);
  double box_norm = 0.0;
  for (const auto& [lo, hi] : cfg.box) box_norm = std::max({box_norm, std::abs(lo), std::abs(hi)});
  const double escape = 4.0 * (1.0 + box_norm);

  SolveResult result;
  std::vector<CriticalPoint> raw;
  for (size_t ci = 0; ci < charts.size(); ++ci) {
    SeedStats stats;
    stats.seeds = static_cast<long>(seeds.size()) / d;
    const auto outcomes = cfg.parallel
                              ? newton_sweep_parallel(compiled[ci], seeds, cfg.newton_max_iter, escape)
                              : newton_sweep_serial(compiled[ci], seeds, cfg.newton_max_iter, escape);
    for (const auto& out : outcomes) {
      if (!out.converged) continue;
      ++stats.converged;
      if (!inside_box(out.x, cfg, 0.05)) {
        ++stats.rejected_residual;
        continue;
      }
      if (!chart_valid_at(P, charts[ci], out.x, cfg.tol.rank_tol)) {
        ++stats.rejected_chart;
        continue;
      }
      double cres = 0.0;
      for (const auto& g : P.constraints)
        cres = std::max(cres, std::abs(g.evaluate<double>(out.x)));
      if (cres > cfg.tol.constraint_tol) {
        ++stats.rejected_residual;
        continue;
      }
      CriticalPoint cp;
      cp.x = out.x;
      cp.chart = charts[ci];
      cp.newton_residual = out.residual;
      raw.push_back(std::move(cp));
    }
    result.per_chart.emplace_back(charts[ci].label(P.var_names), stats);
  }

  // Deterministic cross-chart dedup: lexicographic sort, greedy clustering,
  // cluster represented by its best-converged member.
  std::sort(raw.begin(), raw.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.x < b.x; });
  std::vector<CriticalPoint> unique_pts;
  for (auto& cp : raw) {
    bool dup = false;
    for (auto& kept : unique_pts) {
      if (inf_dist(cp.x, kept.x) <= cfg.tol.dedup_radius * (1.0 + inf_norm(kept.x))) {
        if (cp.newton_residual < kept.newton_residual) kept = cp;
        dup = true;
        break;
      }
    }
    if (!dup) unique_pts.push_back(std::move(cp));
  }

  // Snap each survivor; snapping can merge stalled degenerate twins, so dedup
  // once more with exact points taking precedence.
  std::vector<bool> deficient(unique_pts.size(), false);
  for (size_t i = 0; i < unique_pts.size(); ++i) {
    auto& cp = unique_pts[i];
    size_t chart_idx = 0;
    for (; chart_idx < charts.size(); ++chart_idx)
      if (charts[chart_idx] == cp.chart) break;
    deficient[i] = system_rank_at(compiled[chart_idx], cp.x) < d;
    try_snap_exact(cp, P, systems[chart_idx], cfg.tol, deficient[i]);
    cp.system_rank = deficient[i] ? d - 1 : d;  // refreshed by finalize_diagnostics
  }
  std::vector<size_t> order(unique_pts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (unique_pts[a].exact != unique_pts[b].exact) return unique_pts[a].exact;
    return unique_pts[a].x < unique_pts[b].x;
  });
  std::vector<CriticalPoint> snapped_unique;
  std::vector<bool> kept_deficient;
  for (size_t oi : order) {
    CriticalPoint& cp = unique_pts[oi];
    bool dup = false;
    for (size_t k = 0; k < snapped_unique.size() && !dup; ++k) {
      const CriticalPoint& kept = snapped_unique[k];
      if (kept.exact && cp.exact) {
        dup = kept.x_exact == cp.x_exact;
        continue;
      }
      const double dist = inf_dist(cp.x, kept.x);
      const double scale = 1.0 + inf_norm(kept.x);
      // Exact representatives absorb inexact twins; rank-deficient stalls can
      // sit well off the exact location, so they get a wider radius.
      double radius = cfg.tol.dedup_radius;
      if (kept.exact || cp.exact) radius = (deficient[oi] || kept_deficient[k]) ? 2.5e-3 : 4e-5;
      dup = dist <= radius * scale;
    }
    if (!dup) {
      snapped_unique.push_back(std::move(cp));
      kept_deficient.push_back(deficient[oi]);
    }
  }

  for (auto& cp : snapped_unique)
    if (finalize_diagnostics(cp, P, charts, compiled, cfg)) result.points.push_back(std::move(cp));
  std::sort(result.points.begin(), result.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.x < b.x; });

  detect_family(result, P, cfg);
  return result;
}

}  // namespace critex
