// Compares the serial reference Newton sweep against the OpenMP kernel on the
// bundled problems and checks that their outputs agree bit for bit.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "critex/parse.hpp"
#include "critex/solver.hpp"

using namespace critex;

namespace {

struct BenchCase {
  std::string name;
  std::string text;
  double half_width;
  int seeds;
};

std::chrono::microseconds time_sweep(const CompiledSystem& sys, std::span<const double> seeds,
                                     bool parallel, std::vector<NewtonOutcome>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = parallel ? newton_sweep_parallel(sys, seeds, 60, 50.0)
                 : newton_sweep_serial(sys, seeds, 60, 50.0);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0);
}

bool identical(const std::vector<NewtonOutcome>& a, const std::vector<NewtonOutcome>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].converged != b[i].converged || a[i].x != b[i].x) return false;
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<BenchCase> cases = {
      {"plane-cubic", "vars x y; objective x*y; constraint -2*x^3 + 15*x^2*y + 11*y^3 - 24*y;",
       3.0, 61},
      {"ellipse-circle",
       "vars u v x y; objective (x-u)^2 + (y-v)^2;"
       "constraint x^2/4 + y^2/9 - 1; constraint (u-3)^2 + (v+5)^2 - 1;",
       7.0, 11},
  };

  std::printf("%-16s %10s %12s %12s %8s %s\n", "case", "seeds", "serial", "openmp", "speedup",
              "outputs");
  for (const auto& bc : cases) {
    const ParsedProblem parsed = parse_problem(bc.text);
    const ConstrainedProblem prob{parsed.var_names, parsed.objective, parsed.constraints};
    const int d = prob.dim();
    SearchConfig cfg = SearchConfig::cube(d, bc.half_width, bc.seeds);
    const std::vector<double> seeds = make_seed_grid(cfg, d);

    const Chart chart = Chart::from_dependent(d, [&] {
      std::vector<int> dep;
      for (int i = 0; i < prob.codim(); ++i) dep.push_back(d - 1 - i);
      return dep;
    }());
    const CompiledSystem sys = CompiledSystem::compile(build_critical_system(prob, chart), d);

    std::vector<NewtonOutcome> out_serial, out_parallel;
    // Warm-up, then timed runs.
    time_sweep(sys, seeds, true, out_parallel);
    const auto t_serial = time_sweep(sys, seeds, false, out_serial);
    const auto t_parallel = time_sweep(sys, seeds, true, out_parallel);

    std::printf("%-16s %10zu %9ld us %9ld us %7.2fx %s\n", bc.name.c_str(), seeds.size() / d,
                static_cast<long>(t_serial.count()), static_cast<long>(t_parallel.count()),
                static_cast<double>(t_serial.count()) / std::max<long>(1, t_parallel.count()),
                identical(out_serial, out_parallel) ? "identical" : "MISMATCH");
  }
  return 0;
}
