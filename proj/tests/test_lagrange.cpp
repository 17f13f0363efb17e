#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "critex/classify.hpp"
#include "critex/lagrange.hpp"
#include "critex/parse.hpp"

using namespace critex;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kXYZ = {"x", "y", "z"};

ConstrainedProblem plane_cubic_problem() {
  ConstrainedProblem P;
  P.var_names = kXY;
  P.objective = parse_polynomial("x*y", kXY);
  P.constraints = {parse_polynomial("-2*x^3 + 15*x^2*y + 11*y^3 - 24*y", kXY)};
  return P;
}

ConstrainedProblem space_cubic_problem() {
  ConstrainedProblem P;
  P.var_names = kXYZ;
  P.objective = parse_polynomial("x*y*z", kXYZ);
  P.constraints = {parse_polynomial("-2*x^3 + 15*x^2*y + 11*y^3 - 24*y", kXYZ)};
  return P;
}

ConstrainedProblem ellipse_circle_problem() {
  const std::vector<std::string> names = {"u", "v", "x", "y"};
  ConstrainedProblem P;
  P.var_names = names;
  P.objective = parse_polynomial("(x-u)^2 + (y-v)^2", names);
  P.constraints = {parse_polynomial("x^2/4 + y^2/9 - 1", names),
                   parse_polynomial("(u-3)^2 + (v+5)^2 - 1", names)};
  return P;
}

CriticalPoint refined(const ConstrainedProblem& P, const Chart& chart,
                      const std::vector<double>& x0, double half_width) {
  SearchConfig cfg = SearchConfig::cube(P.dim(), half_width, 9);
  return refine(P, chart, x0, cfg);
}

}  // namespace

TEST_CASE("recover_multipliers: plane cubic at (1,1) gives -1/24 exactly") {
  const auto P = plane_cubic_problem();
  const Chart chart = Chart::from_dependent(2, {1});
  const CriticalPoint cp = refined(P, chart, {1.0, 1.0}, 3.0);
  REQUIRE(cp.exact);
  const MultiplierVector mult = recover_multipliers(P, cp, chart);
  REQUIRE(mult.exact);
  CHECK(mult.lambda_exact[0] == make_rational(-1, 24));

  const CriticalPoint cm = refined(P, chart, {-1.0, -1.0}, 3.0);
  const MultiplierVector mm = recover_multipliers(P, cm, chart);
  CHECK(mm.lambda_exact[0] == make_rational(1, 24));
}

TEST_CASE("recover_multipliers: zero objective gives zero multipliers") {
  auto P = plane_cubic_problem();
  P.objective = Poly(2);
  const Chart chart = Chart::from_dependent(2, {1});
  const CriticalPoint cp = refined(P, chart, {1.0, 1.0}, 3.0);
  const MultiplierVector mult = recover_multipliers(P, cp, chart);
  CHECK(sgn(mult.lambda_exact[0]) == 0);
  CHECK(mult.stationarity_residual == 0.0);
}

TEST_CASE("recover_multipliers: ellipse-circle multiplier table") {
  const auto P = ellipse_circle_problem();
  const Chart chart = Chart::from_dependent(4, {1, 3});
  const struct {
    std::vector<double> x;
    double l1, l2;
  } rows[] = {
      {{3.41407, -5.91025, -0.580423, 2.87089}, -27.528, -9.647},
      {{2.58593, -4.08975, -0.580423, 2.87089}, -21.821, 7.647},
      {{3.64566, -5.76362, 0.982085, -2.61341}, 10.849, -4.1254},
      {{2.35434, -4.23638, 0.982085, -2.61341}, 5.5891, 2.1254},
  };
  for (const auto& row : rows) {
    const CriticalPoint cp = refined(P, chart, row.x, 7.0);
    const MultiplierVector mult = recover_multipliers(P, cp, chart);
    CHECK(mult.lambda[0] == doctest::Approx(row.l1).epsilon(1e-3));
    CHECK(mult.lambda[1] == doctest::Approx(row.l2).epsilon(1e-3));
    CHECK(mult.stationarity_residual < 1e-8);
  }
}

TEST_CASE("bordered oracle: indeterminate at the plane-cubic origin") {
  const auto P = plane_cubic_problem();
  const Chart chart = Chart::from_dependent(2, {1});
  const CriticalPoint cp = refined(P, chart, {0.0, 0.0}, 3.0);
  REQUIRE(cp.exact);
  const MultiplierVector mult = recover_multipliers(P, cp, chart);
  REQUIRE(mult.exact);
  CHECK(sgn(mult.lambda_exact[0]) == 0);
  const BorderedOracle oracle = bordered_hessian_oracle(P, cp, mult);
  REQUIRE(oracle.exact);
  CHECK(sgn(oracle.minors_exact[2]) == 0);  // Gamma_3 = det HL(0,(0,0)) = 0
  CHECK(oracle.verdict == OracleVerdict::Indeterminate);
}

TEST_CASE("bordered oracle: maxima and minima of the plane cubic") {
  const auto P = plane_cubic_problem();
  const Chart chart = Chart::from_dependent(2, {1});
  const CriticalPoint cp = refined(P, chart, {1.0, 1.0}, 3.0);
  const MultiplierVector mult = recover_multipliers(P, cp, chart);
  const BorderedOracle oracle = bordered_hessian_oracle(P, cp, mult);
  CHECK(oracle.verdict == OracleVerdict::Max);
  CHECK(oracle.minors_exact[2] > 0);

  // A quartic-branch point; that branch carries the minima.
  const double rho = std::sqrt((29.0 - 3.0 * std::sqrt(33.0)) / 17.0);
  const double yq = (17.0 / 22.0) * rho * rho * rho - (20.0 / 11.0) * rho;
  const CriticalPoint cq = refined(P, chart, {rho, yq}, 3.0);
  const MultiplierVector mq = recover_multipliers(P, cq, chart);
  const BorderedOracle oq = bordered_hessian_oracle(P, cq, mq);
  CHECK(oq.verdict == OracleVerdict::Min);
}

TEST_CASE("bordered oracle: space cubic saddles have Gamma_3 = 0, Gamma_4 > 0") {
  const auto P = space_cubic_problem();
  const Chart chart = Chart::from_dependent(3, {1});
  const double y0 = 2.0 * std::sqrt(66.0) / 11.0;
  for (double sign : {1.0, -1.0}) {
    const CriticalPoint cp = refined(P, chart, {0.0, sign * y0, 0.0}, 3.0);
    const MultiplierVector mult = recover_multipliers(P, cp, chart);
    CHECK(std::abs(mult.lambda[0]) < 1e-10);
    const BorderedOracle oracle = bordered_hessian_oracle(P, cp, mult);
    CHECK(std::abs(oracle.minors[2]) < 1e-7);
    CHECK(oracle.minors[3] > 1.0);
    CHECK(oracle.verdict == OracleVerdict::Saddle);
    // Faithful evaluation of the bordered determinant: 2304 y0^2.
    CHECK(oracle.minors[3] == doctest::Approx(55296.0 / 11.0).epsilon(1e-9));
  }
}

TEST_CASE("bordered oracle: indeterminate along the z-axis family") {
  const auto P = space_cubic_problem();
  const Chart chart = Chart::from_dependent(3, {1});
  const CriticalPoint cp = refined(P, chart, {0.0, 0.0, 1.0}, 3.0);
  REQUIRE(cp.exact);
  const MultiplierVector mult = recover_multipliers(P, cp, chart);
  const BorderedOracle oracle = bordered_hessian_oracle(P, cp, mult);
  REQUIRE(oracle.exact);
  CHECK(sgn(oracle.minors_exact[2]) == 0);
  CHECK(sgn(oracle.minors_exact[3]) == 0);
  CHECK(oracle.verdict == OracleVerdict::Indeterminate);
}

TEST_CASE("bordered oracle: symbolic minor polynomial at the 4.1 saddles") {
  // det HL restricted to x = z = 0, lambda = 0 is even in y, so it has an
  // exact rational value at y^2 = 24/11 even though y itself is irrational.
  const auto P = space_cubic_problem();
  const std::vector<Rational> lam = {Rational(0)};
  const auto B = bordered_matrix_polys(P, lam);
  REQUIRE(B.size() == 4);
  const Poly det4 = poly_det(B, 3);
  Rational value(0);
  const Rational y_sq = make_rational(24, 11);
  for (const auto& [m, c] : det4.terms()) {
    if (m[0] != 0 || m[2] != 0) continue;
    REQUIRE(m[1] % 2 == 0);
    Rational pw(1);
    for (unsigned i = 0; i < m[1] / 2; ++i) pw *= y_sq;
    value += c * pw;
  }
  CHECK(value == make_rational(55296, 11));
}

TEST_CASE("oracle agreement: decisive verdicts match classify on the corpus") {
  const auto P = plane_cubic_problem();
  SearchConfig scfg = SearchConfig::cube(2, 3.0, 25);
  ClassifyConfig ccfg;
  const SolveResult res = find_critical_points(P, scfg);
  REQUIRE(res.points.size() == 7);
  for (const auto& cp : res.points) {
    const Classification cls = classify_point(P, cp, ccfg);
    const MultiplierVector mult = recover_multipliers(P, cp, cp.chart);
    const BorderedOracle oracle = bordered_hessian_oracle(P, cp, mult);
    if (oracle.verdict == OracleVerdict::Min) CHECK(cls.verdict == Verdict::StrictMin);
    if (oracle.verdict == OracleVerdict::Max) CHECK(cls.verdict == Verdict::StrictMax);
    if (oracle.verdict == OracleVerdict::Saddle) CHECK(cls.verdict == Verdict::Saddle);
  }

  const auto P42 = ellipse_circle_problem();
  SearchConfig cfg42 = SearchConfig::cube(4, 7.0, 7);
  const SolveResult res42 = find_critical_points(P42, cfg42);
  REQUIRE(res42.points.size() == 4);
  int decisive = 0;
  for (const auto& cp : res42.points) {
    const Classification cls = classify_point(P42, cp, ccfg);
    const MultiplierVector mult = recover_multipliers(P42, cp, cp.chart);
    const BorderedOracle oracle = bordered_hessian_oracle(P42, cp, mult);
    if (oracle.verdict == OracleVerdict::Indeterminate) continue;
    ++decisive;
    if (oracle.verdict == OracleVerdict::Min) CHECK(cls.verdict == Verdict::StrictMin);
    if (oracle.verdict == OracleVerdict::Max) CHECK(cls.verdict == Verdict::StrictMax);
    if (oracle.verdict == OracleVerdict::Saddle) CHECK(cls.verdict == Verdict::Saddle);
  }
  CHECK(decisive == 4);
}
