#pragma once

#include <string>
#include <vector>

#include "critex/poly.hpp"

namespace critex {

// Objective f with constraint map G over d = n + m named variables.
// m == 0 is the unconstrained case; m == d arises internally for
// zero-dimensional varieties (isolated feasible points, no free directions).
struct ConstrainedProblem {
  std::vector<std::string> var_names;
  Poly objective;
  std::vector<Poly> constraints;

  int dim() const { return objective.nvars(); }
  int codim() const { return static_cast<int>(constraints.size()); }
  int manifold_dim() const { return dim() - codim(); }

  void validate() const;
};

}  // namespace critex
