#include "critex/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "critex/linalg.hpp"

namespace critex {

std::string oracle_verdict_name(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::Min: return "Min";
    case OracleVerdict::Max: return "Max";
    case OracleVerdict::Saddle: return "Saddle";
    case OracleVerdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

namespace {

template <typename T>
std::vector<T> solve_multipliers(const ConstrainedProblem& P, const Chart& chart,
                                 std::span<const T> x) {
  const int m = P.codim();
  // Transposed minor: (lambda * G'_v = -f_v)  <=>  (G'_v)^T lambda^T = -f_v^T.
  std::vector<T> at(m * m, T(0));
  std::vector<T> rhs(m, T(0));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      at[b * m + a] = P.constraints[a].differentiate(chart.dependent[b]).template evaluate<T>(x);
  for (int b = 0; b < m; ++b)
    rhs[b] = -P.objective.differentiate(chart.dependent[b]).template evaluate<T>(x);
  DenseSolver<T> s;
  s.factor(std::move(at), m);
  return s.solve(rhs);
}

}  // namespace

MultiplierVector recover_multipliers(const ConstrainedProblem& P, const CriticalPoint& cp,
                                     const Chart& chart) {
  P.validate();
  const int d = P.dim();
  const int m = P.codim();
  MultiplierVector out;
  out.chart = chart;
  if (m == 0) return out;

  if (cp.exact) {
    out.lambda_exact = solve_multipliers<Rational>(P, chart, cp.x_exact);
    out.exact = true;
    out.lambda.reserve(m);
    for (const auto& q : out.lambda_exact) out.lambda.push_back(to_double(q));
  } else {
    out.lambda = solve_multipliers<double>(P, chart, cp.x);
  }

  double grad_norm = 0.0, res = 0.0;
  for (int i = 0; i < d; ++i) {
    double gi = P.objective.differentiate(i).evaluate<double>(cp.x);
    grad_norm = std::max(grad_norm, std::abs(gi));
    for (int a = 0; a < m; ++a)
      gi += out.lambda[a] * P.constraints[a].differentiate(i).evaluate<double>(cp.x);
    res = std::max(res, std::abs(gi));
  }
  out.stationarity_residual = res;
  if (res > 1e-6 * (1.0 + grad_norm))
    throw std::runtime_error("recover_multipliers: stationarity residual too large");
  return out;
}

std::vector<std::vector<Poly>> bordered_matrix_polys(const ConstrainedProblem& P,
                                                     std::span<const Rational> lambda) {
  const int d = P.dim();
  const int m = P.codim();
  const int s = m + d;
  Poly lagr = P.objective;
  for (int a = 0; a < m; ++a) lagr += P.constraints[a] * lambda[a];

  std::vector<std::vector<Poly>> b(s, std::vector<Poly>(s, Poly(d)));
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < d; ++j) {
      Poly gij = P.constraints[a].differentiate(j);
      b[a][m + j] = gij;
      b[m + j][a] = std::move(gij);
    }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Poly lij = lagr.differentiate(i).differentiate(j);
      b[m + i][m + j] = lij;
      b[m + j][m + i] = std::move(lij);
    }
  return b;
}

BorderedOracle bordered_hessian_oracle(const ConstrainedProblem& P, const CriticalPoint& cp,
                                       const MultiplierVector& mult) {
  const int d = P.dim();
  const int m = P.codim();
  const int s = m + d;
  const int n = d - m;
  BorderedOracle out;
  if (m == 0) return out;  // unconstrained: not this oracle's job

  // Numeric bordered matrix (exact when the point and multipliers are).
  const bool exact = cp.exact && mult.exact;
  std::vector<Rational> bq;
  std::vector<double> bd(s * s, 0.0);
  if (exact) bq.assign(s * s, Rational(0));

  std::vector<Rational> lam_q = mult.lambda_exact;
  Poly lagr = P.objective;
  for (int a = 0; a < m; ++a)
    lagr += P.constraints[a] * (exact ? lam_q[a] : rational_from_double(mult.lambda[a]));

  auto put = [&](int r, int c, const Poly& p) {
    if (exact) {
      const Rational v = p.evaluate<Rational>(cp.x_exact);
      bq[r * s + c] = v;
      bd[r * s + c] = to_double(v);
    } else {
      bd[r * s + c] = p.evaluate<double>(cp.x);
    }
  };
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < d; ++j) {
      const Poly gij = P.constraints[a].differentiate(j);
      put(a, m + j, gij);
      put(m + j, a, gij);
    }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const Poly lij = lagr.differentiate(i).differentiate(j);
      put(m + i, m + j, lij);
      put(m + j, m + i, lij);
    }

  // Leading principal minors.
  out.exact = exact;
  out.minors.resize(s, 0.0);
  if (exact) out.minors_exact.resize(s, Rational(0));
  for (int r = 1; r <= s; ++r) {
    if (exact) {
      std::vector<Rational> block(r * r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) block[i * r + j] = bq[i * s + j];
      out.minors_exact[r - 1] = dense_det<Rational>(std::move(block), r);
      out.minors[r - 1] = to_double(out.minors_exact[r - 1]);
    } else {
      std::vector<double> block(r * r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) block[i * r + j] = bd[i * s + j];
      out.minors[r - 1] = dense_det<double>(std::move(block), r);
    }
  }

  // Decision on the trailing n minors Gamma_{2m+1} .. Gamma_{m+d}.
  auto minor_sign = [&](int r) -> int {
    if (exact) return sgn(out.minors_exact[r - 1]);
    double scale = 1.0;
    for (int i = 0; i < r; ++i) {
      double row = 0.0;
      for (int j = 0; j < r; ++j) row = std::max(row, std::abs(bd[i * s + j]));
      scale *= std::max(1.0, row);
    }
    const double v = out.minors[r - 1];
    if (std::abs(v) <= 1e-9 * scale) return 0;
    return v > 0 ? 1 : -1;
  };

  if (minor_sign(s) == 0) {
    out.verdict = OracleVerdict::Indeterminate;
    return out;
  }
  bool is_min = n > 0, is_max = n > 0;
  const int min_sign = (m % 2 == 0) ? 1 : -1;
  for (int r = 2 * m + 1; r <= s; ++r) {
    const int sg = minor_sign(r);
    if (sg != min_sign) is_min = false;
    const int max_sign = ((r - m) % 2 == 0) ? 1 : -1;
    if (sg != max_sign) is_max = false;
  }
  if (is_min)
    out.verdict = OracleVerdict::Min;
  else if (is_max)
    out.verdict = OracleVerdict::Max;
  else
    out.verdict = OracleVerdict::Saddle;
  return out;
}

}  // namespace critex
