#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "critex/parse.hpp"
#include "critex/report.hpp"

namespace {

constexpr int kExitParse = 1;
constexpr int kExitNoPoints = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--box", "expected lo:hi, got '" + text + "'");
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

void apply_tol_override(critex::Tolerances& tol, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw CLI::ValidationError("--tol", "expected key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  const double val = std::stod(kv.substr(eq + 1));
  if (key == "constraint")
    tol.constraint_tol = val;
  else if (key == "gradient")
    tol.gradient_tol = val;
  else if (key == "dedup")
    tol.dedup_radius = val;
  else if (key == "rank")
    tol.rank_tol = val;
  else if (key == "value")
    tol.value_tol = val;
  else if (key == "eig")
    tol.eig_tol = val;
  else
    throw CLI::ValidationError("--tol", "unknown tolerance '" + key + "'");
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critex: constrained critical points without Lagrange multipliers"};
  app.require_subcommand(1);

  std::string file, output, format = "text";
  std::vector<std::string> box_args, tol_args;
  int seeds = 0, kmax = 10, depth_max = 4;
  bool serial = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", file, "problem definition file")->required();
    cmd->add_option("--box", box_args,
                    "search box lo:hi (one per variable, or a single range for all)");
    cmd->add_option("--seeds-per-axis", seeds, "Newton seeds per axis");
    cmd->add_option("--kmax", kmax, "highest Taylor degree examined");
    cmd->add_option("--depth-max", depth_max, "vanishing-set descent depth cap");
    cmd->add_option("--tol", tol_args, "tolerance override key=value");
    cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("-o,--output", output, "write the report to a file");
    cmd->add_flag("--serial", serial, "run the seed sweep on one thread");
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "find and classify all critical points");
  add_common(analyze_cmd);
  CLI::App* subsidiary_cmd =
      app.add_subcommand("subsidiary", "image of a homogeneous polynomial over the unit sphere "
                                       "(plus optional extra constraints)");
  add_common(subsidiary_cmd);

  CLI11_PARSE(app, argc, argv);

  critex::ParsedProblem parsed;
  try {
    parsed = critex::parse_problem(read_file(file));
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  const int dim = static_cast<int>(parsed.var_names.size());
  critex::SearchConfig scfg;
  try {
    if (box_args.empty()) {
      scfg.box.assign(dim, {-3.0, 3.0});
    } else if (box_args.size() == 1) {
      scfg.box.assign(dim, parse_range(box_args[0]));
    } else if (static_cast<int>(box_args.size()) == dim) {
      for (const auto& b : box_args) scfg.box.push_back(parse_range(b));
    } else {
      std::cerr << "error: --box given " << box_args.size() << " times for " << dim
                << " variables\n";
      return kExitParse;
    }
    if (seeds > 0) scfg.seeds_per_axis = seeds;
    for (const auto& kv : tol_args) apply_tol_override(scfg.tol, kv);
    scfg.parallel = !serial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  critex::ClassifyConfig ccfg;
  ccfg.k_max = kmax;
  ccfg.depth_max = depth_max;
  ccfg.tol = scfg.tol;
  ccfg.parallel = !serial;

  try {
    if (analyze_cmd->parsed()) {
      critex::ConstrainedProblem prob{parsed.var_names, parsed.objective, parsed.constraints};
      critex::Report rep = critex::analyze(prob, scfg, ccfg);
      if (rep.points.empty()) {
        std::cerr << "no critical points found in the search box\n";
        return kExitNoPoints;
      }
      emit(format == "json" ? rep.to_json_string() : rep.to_text(), output);
      return 0;
    }

    // subsidiary: unit sphere implied as the first constraint.
    if (!parsed.objective.is_homogeneous() || parsed.objective.total_degree() < 1) {
      std::cerr << "error: subsidiary objective must be a nonzero homogeneous polynomial\n";
      return kExitParse;
    }
    critex::SubsidiaryProblem sub = critex::make_sphere_problem(dim, parsed.objective);
    for (const auto& g : parsed.constraints) {
      sub.constraints.push_back(g);
      sub.constraint_labels.push_back(g.to_string(parsed.var_names) + " = 0");
    }
    if (seeds > 0) ccfg.subsidiary_seeds_per_axis = seeds;
    critex::IntervalImage img = critex::solve_subsidiary(sub, ccfg);
    emit(format == "json" ? critex::interval_image_to_json(img)
                          : critex::interval_image_to_text(img),
         output);
    return 0;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    if (what.find("no real critical points") != std::string::npos) return kExitNoPoints;
    return kExitInternal;
  }
}
