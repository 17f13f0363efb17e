#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critex/config.hpp"
#include "critex/problem.hpp"

namespace critex {

// A choice of m dependent variables whose constraint minor G'_v is
// nonsingular; the remaining n variables parametrize the manifold locally.
struct Chart {
  std::vector<int> dependent;    // sorted, size m
  std::vector<int> independent;  // sorted, size n

  static Chart from_dependent(int dim, std::vector<int> dep);
  bool operator==(const Chart& o) const { return dependent == o.dependent; }
  std::string label(std::span<const std::string> names) const;
};

// Minor G'_v at X for a candidate dependent set; also reports the row-norm
// scale used by the rank test.
double chart_minor_det(const ConstrainedProblem& P, const Chart& chart, std::span<const double> X,
                       double* scale = nullptr);

bool chart_valid_at(const ConstrainedProblem& P, const Chart& chart, std::span<const double> X,
                    double rank_tol);

// All size-m dependent sets with |det G'_v(X)| above the scaled rank
// tolerance, strongest minor first. Empty means rank(G'(X)) < m.
std::vector<Chart> enumerate_charts(const ConstrainedProblem& P, std::span<const double> X,
                                    double rank_tol = Tolerances{}.rank_tol);

// Symbolic denominator-cleared critical system for one chart:
// n polynomials det(G'_v)*J_i followed by the m constraints.
struct CriticalSystem {
  Chart chart;
  std::vector<Poly> equations;
  Poly minor_det;
};
CriticalSystem build_critical_system(const ConstrainedProblem& P, const Chart& chart);

// Symbolic determinant and adjugate over the polynomial ring (Laplace
// expansion; intended for the small minors that occur here).
Poly poly_det(const std::vector<std::vector<Poly>>& M, int nvars);
std::vector<std::vector<Poly>> poly_adjugate(const std::vector<std::vector<Poly>>& M, int nvars);

namespace detail {
class JetSpace;
}

// Derivatives of the implicit map h at one point, to a requested order,
// obtained by differentiating G(u, h(u)) = 0 through an extended polynomial
// ring with formal h-tensor symbols. T is double or Rational; the rational
// instantiation is exact.
template <typename T>
class ImplicitJet {
 public:
  ImplicitJet(const ConstrainedProblem& P, const Chart& chart, std::vector<T> point, int order,
              const Tolerances& tol = {});
  ~ImplicitJet();
  ImplicitJet(ImplicitJet&&) noexcept;
  ImplicitJet& operator=(ImplicitJet&&) noexcept;

  const Chart& chart() const { return chart_; }
  const std::vector<T>& point() const { return point_; }
  int order() const { return order_; }
  int reduced_dim() const { return static_cast<int>(chart_.independent.size()); }

  void extend(int order);

  // h_{dep_pos, I} with I an exponent vector over the n independent slots.
  T h_value(int dep_pos, const Monomial& u_multi) const;
  // Entries of G'_v(X) and its inverse.
  const std::vector<T>& minor_matrix() const { return minor_; }
  const std::vector<T>& minor_inverse() const { return minor_inv_; }

  // J_E for |E| <= order; exponent-vector multi-index over independent slots.
  T reduced_partial(const Monomial& E);
  std::vector<T> reduced_gradient();
  std::vector<T> reduced_hessian();               // row-major n x n
  std::map<Monomial, T> reduced_tensor(int r);    // all |E| = r

 private:
  const ConstrainedProblem* prob_;
  Chart chart_;
  std::vector<T> point_;
  int order_ = 0;
  std::unique_ptr<detail::JetSpace> space_;
  std::vector<T> values_;      // extended ring variable values
  std::vector<T> minor_;       // m*m row-major
  std::vector<T> minor_inv_;   // m*m row-major
  std::map<Monomial, T> reduced_cache_;

  void solve_order(int k);
};

using JetD = ImplicitJet<double>;
using JetQ = ImplicitJet<Rational>;

// Free-function entry points.
template <typename T>
ImplicitJet<T> implicit_jet(const ConstrainedProblem& P, const Chart& chart,
                            std::span<const T> X, int order, const Tolerances& tol = {}) {
  return ImplicitJet<T>(P, chart, std::vector<T>(X.begin(), X.end()), order, tol);
}

template <typename T>
std::vector<T> reduced_gradient(ImplicitJet<T>& jet) {
  return jet.reduced_gradient();
}
template <typename T>
std::vector<T> reduced_hessian(ImplicitJet<T>& jet) {
  return jet.reduced_hessian();
}
template <typename T>
std::map<Monomial, T> reduced_derivative_tensor(ImplicitJet<T>& jet, int r) {
  return jet.reduced_tensor(r);
}

// Enumeration of exponent multi-indices over n slots with total degree k.
std::vector<Monomial> multi_indices(int n, int k);

}  // namespace critex
