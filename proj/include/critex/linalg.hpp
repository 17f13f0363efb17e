#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "critex/rational.hpp"

namespace critex {

// Small dense LU with partial pivoting over double or Rational; the rational
// instantiation is exact. Throws std::runtime_error("singular minor") when a
// pivot column vanishes.
template <typename T>
struct DenseSolver {
  int n = 0;
  std::vector<T> lu;
  std::vector<int> perm;
  T det{};

  static double weight(const T& v) {
    if constexpr (std::is_same_v<T, double>)
      return std::abs(v);
    else
      return std::abs(to_double(v));
  }

  void factor(std::vector<T> a, int size) {
    n = size;
    lu = std::move(a);
    perm.resize(n);
    det = T(1);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int c = 0; c < n; ++c) {
      int piv = c;
      double best = weight(lu[c * n + c]);
      for (int r = c + 1; r < n; ++r) {
        const double w = weight(lu[r * n + c]);
        if (w > best) {
          best = w;
          piv = r;
        }
      }
      bool singular;
      if constexpr (std::is_same_v<T, double>)
        singular = !(best > 0.0) || !std::isfinite(best);
      else
        singular = sgn(lu[piv * n + c]) == 0;
      if (singular) throw std::runtime_error("singular minor");
      if (piv != c) {
        for (int k = 0; k < n; ++k) std::swap(lu[piv * n + k], lu[c * n + k]);
        std::swap(perm[piv], perm[c]);
        det = -det;
      }
      det = det * lu[c * n + c];
      for (int r = c + 1; r < n; ++r) {
        T f = lu[r * n + c] / lu[c * n + c];
        lu[r * n + c] = f;
        for (int k = c + 1; k < n; ++k) lu[r * n + k] = lu[r * n + k] - f * lu[c * n + k];
      }
    }
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    std::vector<T> y(n, T(0));
    for (int i = 0; i < n; ++i) y[i] = b[perm[i]];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) y[i] = y[i] - lu[i * n + j] * y[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) y[i] = y[i] - lu[i * n + j] * y[j];
      y[i] = y[i] / lu[i * n + i];
    }
    return y;
  }

  std::vector<T> inverse() const {
    std::vector<T> inv(n * n, T(0));
    std::vector<T> e(n, T(0));
    for (int c = 0; c < n; ++c) {
      std::fill(e.begin(), e.end(), T(0));
      e[c] = T(1);
      auto col = solve(e);
      for (int r = 0; r < n; ++r) inv[r * n + c] = col[r];
    }
    return inv;
  }
};

// Determinant that reports singular matrices as zero instead of throwing.
template <typename T>
T dense_det(std::vector<T> a, int n) {
  DenseSolver<T> s;
  try {
    s.factor(std::move(a), n);
  } catch (const std::runtime_error&) {
    return T(0);
  }
  return s.det;
}

}  // namespace critex
