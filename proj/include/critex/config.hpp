#pragma once

namespace critex {

struct Tolerances {
  // Chart minor |det| threshold, scaled by the minor's row norms.
  double rank_tol = 1e-9;
  double constraint_tol = 1e-9;
  double gradient_tol = 1e-9;
  double dedup_radius = 1e-6;
  // Sign decisions on interval endpoints and tensor coefficients.
  double value_tol = 1e-9;
  // Hessian eigenvalue dead zone, scaled by the spectral radius estimate.
  double eig_tol = 1e-8;
  // Rational snapping of converged coordinates.
  long snap_max_den = 1024;
  double snap_tol = 1e-9;
};

}  // namespace critex
