// lacomp: derives, costs, emits and validates algorithms for a problem file.
//
// Exit status: 0 success, 2 parse or usage error, 3 no algorithm within the
// limits, 4 validation mismatch, 1 anything else.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lacomp/codegen.hpp"
#include "lacomp/problem.hpp"
#include "lacomp/report.hpp"

namespace {

using namespace lacomp;

constexpr int kParseError = 2;
constexpr int kNoAlgorithm = 3;
constexpr int kMismatch = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// "n=32,p=3,m=4,t=3,seed=7[,trials=20]" over the defaults of the problem file.
ValidationOptions validation_options(const std::string& spec, const Problem& problem) {
  ValidationOptions o;
  o.sizes = problem.sizes;
  std::stringstream in(spec);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("--validate expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    long long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("--validate: '" + item + "' is not an integer assignment");
    }
    if (key == "seed") {
      o.seed = static_cast<std::uint64_t>(value);
    } else if (key == "trials") {
      if (value < 1) throw Error("--validate: trials must be positive");
      o.trials = static_cast<int>(value);
    } else {
      o.sizes[key] = value;
    }
  }
  for (const auto& s : problem.ctx.size_symbols())
    if (!o.sizes.count(s)) throw Error("--validate: no value for size '" + s + "'");
  return o;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear algebra compiler: derives kernel-level algorithms for matrix equations."};
  std::string input;
  std::vector<std::string> emits;
  int max_depth = DerivationLimits{}.max_depth;
  std::size_t max_nodes = DerivationLimits{}.max_nodes;
  std::size_t top = 0;
  std::size_t prune_top = 0;
  std::string validate_spec;
  std::string target = "pseudo";
  std::string catalog_path;
  std::string output_dir;

  if (const char* env = std::getenv("LACOMP_MAX_NODES")) {
    try {
      max_nodes = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "error: LACOMP_MAX_NODES is not a number: " << env << "\n";
      return kParseError;
    }
  }

  app.add_option("--input", input, "Problem file")->required();
  app.add_option("--emit", emits, "algorithms, cost, code or json (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember({"algorithms", "cost", "code", "json"}));
  app.add_option("--max-depth", max_depth, "Derivation depth limit")->check(CLI::PositiveNumber);
  app.add_option("--max-nodes", max_nodes, "Derivation node limit (default from LACOMP_MAX_NODES or 5000)")
      ->check(CLI::PositiveNumber);
  app.add_option("--top", top, "Report only the K cheapest algorithms");
  app.add_option("--prune-top", prune_top, "Keep only the K best-ranked segment children per node");
  auto* validate_opt = app.add_option("--validate", validate_spec,
                                      "Compare with the oracle: n=..,p=..,m=..,t=..,seed=..[,trials=..]")
                           ->expected(0, 1);
  app.add_option("--target", target, "Code target")->check(CLI::IsMember({"pseudo"}));
  app.add_option("--catalog", catalog_path, "Kernel catalog file (default: built-in)");
  app.add_option("--output-dir", output_dir, "Write code files and report.json here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }
  if (emits.empty()) emits = {"algorithms", "cost"};
  auto wants = [&](const char* what) { return std::find(emits.begin(), emits.end(), what) != emits.end(); };

  Problem problem;
  Catalog catalog;
  try {
    problem = parse_problem(read_file(input));
    catalog = catalog_path.empty() ? Catalog::defaults() : Catalog::parse(read_file(catalog_path));
  } catch (const ParseError& e) {
    std::cerr << input << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
    return kParseError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }

  ValidationOptions vopts;
  if (validate_opt->count() > 0) {
    try {
      vopts = validation_options(validate_spec, problem);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kParseError;
    }
  }

  try {
    DerivationLimits limits;
    limits.max_depth = max_depth;
    limits.max_nodes = max_nodes;
    limits.top_k = prune_top;
    DerivationResult result;
    try {
      result = derive(problem.equation, problem.ctx, limits, catalog);
    } catch (const NoAlgorithmError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kNoAlgorithm;
    }
    std::vector<Algorithm> algs = result.algorithms;
    if (top > 0 && algs.size() > top) algs.resize(top);

    std::filesystem::path dir(output_dir);
    if (!output_dir.empty()) std::filesystem::create_directories(dir);

    if (wants("algorithms")) std::cout << format_algorithms(algs);
    if (wants("cost")) std::cout << format_costs(algs, problem.sequence);
    if (wants("code")) {
      for (const auto& alg : algs)
        for (Scenario s : scenarios_of(problem.sequence)) {
          std::string code = emit_code(alg, problem.sequence, s, target);
          std::string file = alg.name + "." + std::string(scenario_name(s)) + "." + target;
          if (output_dir.empty()) {
            std::cout << "## " << file << "\n" << code << "\n";
          } else {
            write_text(dir / file, code);
          }
        }
    }

    std::vector<ValidationResult> vres;
    if (validate_opt->count() > 0) {
      vres = lacomp::validate(problem, algs, vopts);
      // Keep stdout parseable when it carries the JSON report.
      bool json_on_stdout = wants("json") && output_dir.empty();
      (json_on_stdout ? std::cerr : std::cout) << format_validation(vres, vopts);
    }

    if (wants("json")) {
      ReportInput in;
      in.problem = &problem;
      in.derivation = &result;
      in.algorithms = algs;
      in.with_code = wants("code");
      in.target = target;
      if (validate_opt->count() > 0) {
        in.validation = &vres;
        in.validation_options = &vopts;
      }
      std::string json = json_report(in);
      if (output_dir.empty()) {
        std::cout << json;
      } else {
        write_text(dir / "report.json", json);
      }
    }

    for (const auto& r : vres)
      if (!r.ok()) return kMismatch;
  } catch (const ParseError& e) {
    std::cerr << input << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
    return kParseError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
