#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critex/poly.hpp"

namespace critex {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

struct ParsedProblem {
  std::vector<std::string> var_names;
  Poly objective;
  std::vector<Poly> constraints;
  bool has_objective = false;
};

// Problem files: `vars x y z;` then `objective <poly>;` then zero or more
// `constraint <poly>;`. Whitespace-insensitive, `#` starts a line comment,
// `^` integer power, rationals as `p/q` (division only by nonzero constants).
ParsedProblem parse_problem(std::string_view text);

// Single polynomial over an already-declared variable list.
Poly parse_polynomial(std::string_view text, std::span<const std::string> var_names);

}  // namespace critex
