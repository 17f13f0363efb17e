#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "critex/parse.hpp"
#include "critex/report.hpp"

using namespace critex;

namespace {

Report plane_cubic_report(int seeds = 15) {
  const std::vector<std::string> kXY = {"x", "y"};
  ConstrainedProblem P;
  P.var_names = kXY;
  P.objective = parse_polynomial("x*y", kXY);
  P.constraints = {parse_polynomial("-2*x^3 + 15*x^2*y + 11*y^3 - 24*y", kXY)};
  SearchConfig scfg = SearchConfig::cube(2, 3.0, seeds);
  ClassifyConfig ccfg;
  return analyze(P, scfg, ccfg);
}

}  // namespace

TEST_CASE("report: byte-stable serialization across runs") {
  const std::string a = plane_cubic_report().to_json_string();
  const std::string b = plane_cubic_report().to_json_string();
  CHECK(a == b);
  CHECK(!plane_cubic_report().to_text().empty());
}

TEST_CASE("report: json re-parses and reproduces all numeric fields exactly") {
  const Report rep = plane_cubic_report();
  const std::string text = rep.to_json_string();
  const auto j = nlohmann::json::parse(text);

  REQUIRE(j.contains("critical_points"));
  const auto& pts = j["critical_points"];
  REQUIRE(pts.size() == rep.points.size());
  for (size_t i = 0; i < rep.points.size(); ++i) {
    const auto& pj = pts[i];
    for (size_t v = 0; v < rep.points[i].point.x.size(); ++v) {
      const double round_tripped = pj["x"][v].get<double>();
      CHECK(round_tripped == rep.points[i].point.x[v]);  // exact, not approximate
    }
    CHECK(pj["objective_value"].get<double>() == rep.points[i].objective_value);
    CHECK(pj["gradient_residual"].get<double>() == rep.points[i].point.gradient_residual);
  }
  // Re-serializing the parsed document must reproduce the bytes.
  const auto ordered = nlohmann::ordered_json::parse(text);
  CHECK(ordered.dump(2) + "\n" == text);
}

TEST_CASE("report: plane cubic ends with 3 maxima and 4 minima") {
  const Report rep = plane_cubic_report(25);
  REQUIRE(rep.points.size() == 7);
  int maxima = 0, minima = 0;
  for (const auto& pr : rep.points) {
    if (pr.classification.verdict == Verdict::StrictMax) ++maxima;
    if (pr.classification.verdict == Verdict::StrictMin) ++minima;
    CHECK(pr.have_multipliers);
    CHECK(pr.oracle_agrees);
  }
  CHECK(maxima == 3);
  CHECK(minima == 4);
}

TEST_CASE("report: unconstrained problems skip multiplier fields") {
  const std::vector<std::string> kXY = {"x", "y"};
  ConstrainedProblem P;
  P.var_names = kXY;
  P.objective = parse_polynomial("x^2 + y^2", kXY);
  SearchConfig scfg = SearchConfig::cube(2, 2.0, 7);
  ClassifyConfig ccfg;
  const Report rep = analyze(P, scfg, ccfg);
  REQUIRE(rep.points.size() == 1);
  CHECK(!rep.points[0].have_multipliers);
  CHECK(rep.points[0].classification.verdict == Verdict::StrictMin);
  const auto j = nlohmann::json::parse(rep.to_json_string());
  CHECK(!j["critical_points"][0].contains("multipliers"));
}
