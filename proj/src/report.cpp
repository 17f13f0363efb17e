#include "critex/report.hpp"

#include <json.hpp>
#include <sstream>

namespace critex {

using ordered_json = nlohmann::ordered_json;

namespace {

bool verdict_matches_oracle(Verdict v, OracleVerdict o) {
  switch (o) {
    case OracleVerdict::Min: return v == Verdict::StrictMin || v == Verdict::NonStrictMin;
    case OracleVerdict::Max: return v == Verdict::StrictMax || v == Verdict::NonStrictMax;
    case OracleVerdict::Saddle: return v == Verdict::Saddle;
    case OracleVerdict::Indeterminate: return true;
  }
  return true;
}

ordered_json point_json(const PointReport& pr, const ConstrainedProblem& P) {
  ordered_json j;
  j["x"] = pr.point.x;
  j["exact"] = pr.point.exact;
  if (pr.point.exact) {
    std::vector<std::string> xs;
    for (const auto& q : pr.point.x_exact) xs.push_back(rational_to_string(q));
    j["x_exact"] = xs;
  }
  j["chart"] = pr.point.chart.label(P.var_names);
  j["objective_value"] = pr.objective_value;
  j["constraint_residual"] = pr.point.constraint_residual;
  j["gradient_residual"] = pr.point.gradient_residual;
  j["system_rank"] = pr.point.system_rank;
  j["system_size"] = pr.point.system_size;
  j["family_id"] = pr.point.family_id;

  ordered_json cls;
  cls["verdict"] = verdict_name(pr.classification.verdict);
  if (!pr.classification.reason.empty()) cls["reason"] = pr.classification.reason;
  ordered_json steps = ordered_json::array();
  for (const auto& s : pr.classification.evidence) {
    ordered_json sj;
    sj["stage"] = s.stage;
    if (s.stage == "hessian") {
      sj["eigenvalues"] = s.eigenvalues;
    } else {
      sj["degree"] = s.degree;
      sj["interval"] = {s.lo, s.hi};
    }
    if (!s.case_label.empty()) sj["case"] = s.case_label;
    if (!s.active_constraints.empty()) sj["active_constraints"] = s.active_constraints;
    if (!s.notes.empty()) sj["notes"] = s.notes;
    steps.push_back(std::move(sj));
  }
  cls["evidence"] = std::move(steps);
  j["classification"] = std::move(cls);

  if (pr.have_multipliers) {
    ordered_json mj;
    mj["values"] = pr.multipliers.lambda;
    if (pr.multipliers.exact) {
      std::vector<std::string> ls;
      for (const auto& q : pr.multipliers.lambda_exact) ls.push_back(rational_to_string(q));
      mj["values_exact"] = ls;
    }
    mj["stationarity_residual"] = pr.multipliers.stationarity_residual;
    j["multipliers"] = std::move(mj);

    ordered_json oj;
    oj["verdict"] = oracle_verdict_name(pr.oracle.verdict);
    oj["minors"] = pr.oracle.minors;
    if (pr.oracle.exact) {
      std::vector<std::string> ms;
      for (const auto& q : pr.oracle.minors_exact) ms.push_back(rational_to_string(q));
      oj["minors_exact"] = ms;
    }
    oj["decisive"] = pr.oracle_decisive;
    oj["agrees"] = pr.oracle_agrees;
    j["bordered_oracle"] = std::move(oj);
  }
  return j;
}

}  // namespace

Report analyze(const ConstrainedProblem& P, const SearchConfig& scfg, const ClassifyConfig& ccfg) {
  P.validate();
  Report rep;
  rep.problem = P;
  rep.search = scfg;
  rep.classify = ccfg;

  SolveResult res = find_critical_points(P, scfg);
  rep.per_chart = res.per_chart;
  rep.families = res.families;

  for (const auto& cp : res.points) {
    PointReport pr;
    pr.point = cp;
    pr.objective_value = P.objective.evaluate<double>(cp.x);
    pr.classification = classify_point(P, cp, ccfg);
    if (P.codim() > 0) {
      try {
        pr.multipliers = recover_multipliers(P, cp, cp.chart);
        pr.have_multipliers = true;
        pr.oracle = bordered_hessian_oracle(P, cp, pr.multipliers);
        pr.oracle_decisive = pr.oracle.verdict != OracleVerdict::Indeterminate;
        pr.oracle_agrees = verdict_matches_oracle(pr.classification.verdict, pr.oracle.verdict);
      } catch (const std::exception&) {
        pr.have_multipliers = false;
      }
    }
    rep.points.push_back(std::move(pr));
  }
  for (const auto& fam : rep.families) {
    std::vector<std::string> verdicts;
    for (int member : fam.members)
      verdicts.push_back(verdict_name(rep.points[member].classification.verdict));
    rep.family_verdicts.push_back(std::move(verdicts));
  }
  return rep;
}

std::string Report::to_json_string() const {
  ordered_json j;
  ordered_json prob;
  prob["vars"] = problem.var_names;
  prob["objective"] = problem.objective.to_string(problem.var_names);
  std::vector<std::string> cs;
  for (const auto& g : problem.constraints) cs.push_back(g.to_string(problem.var_names));
  prob["constraints"] = cs;
  j["problem"] = std::move(prob);

  ordered_json cfg;
  ordered_json box = ordered_json::array();
  for (const auto& [lo, hi] : search.box) box.push_back({lo, hi});
  cfg["box"] = std::move(box);
  cfg["seeds_per_axis"] = search.seeds_per_axis;
  cfg["k_max"] = classify.k_max;
  cfg["depth_max"] = classify.depth_max;
  cfg["constraint_tol"] = search.tol.constraint_tol;
  cfg["gradient_tol"] = search.tol.gradient_tol;
  cfg["dedup_radius"] = search.tol.dedup_radius;
  cfg["rank_tol"] = search.tol.rank_tol;
  cfg["value_tol"] = search.tol.value_tol;
  j["config"] = std::move(cfg);

  ordered_json charts = ordered_json::array();
  for (const auto& [label, st] : per_chart) {
    ordered_json c;
    c["chart"] = label;
    c["seeds"] = st.seeds;
    c["converged"] = st.converged;
    c["rejected_chart"] = st.rejected_chart;
    c["rejected_residual"] = st.rejected_residual;
    charts.push_back(std::move(c));
  }
  j["charts"] = std::move(charts);

  ordered_json pts = ordered_json::array();
  for (const auto& pr : points) pts.push_back(point_json(pr, problem));
  j["critical_points"] = std::move(pts);

  ordered_json fams = ordered_json::array();
  for (size_t i = 0; i < families.size(); ++i) {
    const auto& fam = families[i];
    ordered_json fj;
    fj["id"] = fam.id;
    fj["members"] = fam.members;
    fj["sample_count"] = fam.samples.size();
    if (i < family_verdicts.size()) fj["member_verdicts"] = family_verdicts[i];
    fams.push_back(std::move(fj));
  }
  j["families"] = std::move(fams);

  ordered_json stats;
  stats["point_count"] = points.size();
  stats["family_count"] = families.size();
  j["statistics"] = std::move(stats);
  return j.dump(2) + "\n";
}

std::string Report::to_text() const {
  std::ostringstream out;
  out << "problem: minimize/maximize " << problem.objective.to_string(problem.var_names) << "\n";
  for (const auto& g : problem.constraints)
    out << "  subject to " << g.to_string(problem.var_names) << " = 0\n";
  out << "charts:\n";
  for (const auto& [label, st] : per_chart)
    out << "  " << label << ": seeds " << st.seeds << ", converged " << st.converged
        << ", rejected (chart " << st.rejected_chart << ", residual " << st.rejected_residual
        << ")\n";
  out << "critical points (" << points.size() << "):\n";
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& pr = points[i];
    out << "  [" << i << "] (";
    for (size_t v = 0; v < pr.point.x.size(); ++v) {
      if (v) out << ", ";
      out << pr.point.x[v];
    }
    out << ")";
    if (pr.point.exact) {
      out << " = (";
      for (size_t v = 0; v < pr.point.x_exact.size(); ++v) {
        if (v) out << ", ";
        out << rational_to_string(pr.point.x_exact[v]);
      }
      out << ")";
    }
    out << "\n      f = " << pr.objective_value << ", chart " << pr.point.chart.label(problem.var_names)
        << ", |G| = " << pr.point.constraint_residual << ", |grad J| = " << pr.point.gradient_residual;
    if (pr.point.family_flag) out << ", family #" << pr.point.family_id;
    out << "\n      verdict: " << verdict_name(pr.classification.verdict);
    if (!pr.classification.reason.empty()) out << " (" << pr.classification.reason << ")";
    out << "\n";
    for (const auto& s : pr.classification.evidence) {
      out << "        " << s.stage;
      if (s.stage == "hessian") {
        out << " eigenvalues:";
        for (double e : s.eigenvalues) out << " " << e;
      } else {
        out << " degree " << s.degree << " image [" << s.lo << ", " << s.hi << "]";
      }
      if (!s.case_label.empty()) out << " case " << s.case_label;
      for (const auto& note : s.notes) out << " [" << note << "]";
      out << "\n";
    }
    if (pr.have_multipliers) {
      out << "      multipliers:";
      for (double l : pr.multipliers.lambda) out << " " << l;
      out << "  oracle: " << oracle_verdict_name(pr.oracle.verdict)
          << (pr.oracle_decisive ? (pr.oracle_agrees ? " (agrees)" : " (DISAGREES)") : "") << "\n";
    }
  }
  if (!families.empty()) {
    out << "families:\n";
    for (size_t i = 0; i < families.size(); ++i) {
      const auto& fam = families[i];
      out << "  #" << fam.id << ": members";
      for (int mi : fam.members) out << " [" << mi << "]";
      out << ", " << fam.samples.size() << " continuation samples";
      if (i < family_verdicts.size()) {
        out << ", verdicts along family:";
        for (const auto& v : family_verdicts[i]) out << " " << v;
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string interval_image_to_json(const IntervalImage& img) {
  ordered_json j;
  j["interval"] = {img.lo, img.hi};
  if (img.lo_exact) j["lo_exact"] = rational_to_string(img.lo_q);
  if (img.hi_exact) j["hi_exact"] = rational_to_string(img.hi_q);
  auto witness_array = [](const std::vector<Witness>& ws) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : ws) {
      ordered_json wj;
      wj["x"] = w.x;
      wj["value"] = w.value;
      wj["exact"] = w.exact;
      wj["on_family"] = w.on_family;
      arr.push_back(std::move(wj));
    }
    return arr;
  };
  j["minimizers"] = witness_array(img.minimizers);
  j["maximizers"] = witness_array(img.maximizers);
  ordered_json zj;
  zj["isolated"] = witness_array(img.zeros.isolated);
  zj["family_samples"] = witness_array(img.zeros.family_samples);
  zj["has_family"] = img.zeros.has_family;
  j["zero_set"] = std::move(zj);
  return j.dump(2) + "\n";
}

std::string interval_image_to_text(const IntervalImage& img) {
  std::ostringstream out;
  out << "image interval: [" << img.lo << ", " << img.hi << "]";
  if (img.lo_exact) out << "  (lo = " << rational_to_string(img.lo_q) << ")";
  if (img.hi_exact) out << "  (hi = " << rational_to_string(img.hi_q) << ")";
  out << "\n";
  auto dump = [&](const char* name, const std::vector<Witness>& ws) {
    out << name << ":";
    size_t shown = 0;
    for (const auto& w : ws) {
      if (shown++ >= 8) {
        out << " ...";
        break;
      }
      out << " (";
      for (size_t v = 0; v < w.x.size(); ++v) {
        if (v) out << ", ";
        out << w.x[v];
      }
      out << ")";
    }
    out << "\n";
  };
  dump("minimizers", img.minimizers);
  dump("maximizers", img.maximizers);
  dump("zeros (isolated)", img.zeros.isolated);
  if (img.zeros.has_family)
    out << "zero set contains positive-dimensional components ("
        << img.zeros.family_samples.size() << " samples)\n";
  return out.str();
}

}  // namespace critex
