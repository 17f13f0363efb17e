#pragma once

#include <string>
#include <vector>

#include "critex/classify.hpp"
#include "critex/lagrange.hpp"

namespace critex {

struct PointReport {
  CriticalPoint point;
  double objective_value = 0.0;
  Classification classification;
  MultiplierVector multipliers;
  bool have_multipliers = false;
  BorderedOracle oracle;
  bool oracle_decisive = false;
  bool oracle_agrees = true;
};

struct Report {
  ConstrainedProblem problem;
  SearchConfig search;
  ClassifyConfig classify;
  std::vector<std::pair<std::string, SeedStats>> per_chart;
  std::vector<PointReport> points;
  std::vector<Family> families;
  std::vector<std::vector<std::string>> family_verdicts;  // per family, per member

  std::string to_text() const;
  // Single top-level object, stable key order, shortest round-trip numbers.
  std::string to_json_string() const;
};

// Full pipeline: charts -> solve -> classify -> multipliers -> oracle.
Report analyze(const ConstrainedProblem& P, const SearchConfig& scfg, const ClassifyConfig& ccfg);

std::string interval_image_to_json(const IntervalImage& img);
std::string interval_image_to_text(const IntervalImage& img);

}  // namespace critex
