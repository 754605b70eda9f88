#include "lacomp/report.hpp"

#include <cstdio>
#include <json.hpp>

#include "lacomp/codegen.hpp"
#include "lacomp/refexec.hpp"

namespace lacomp {

std::vector<Scenario> scenarios_of(const SequenceSpec& spec) {
  std::vector<Scenario> out{Scenario::Single};
  if (spec.indices.size() >= 1) out.push_back(Scenario::OneD);
  if (spec.indices.size() >= 2) out.push_back(Scenario::TwoD);
  return out;
}

std::vector<ScenarioCost> scenario_costs(const Algorithm& alg, const SequenceSpec& spec) {
  std::vector<ScenarioCost> out;
  for (Scenario s : scenarios_of(spec)) {
    ScheduledAlgorithm sched = schedule(alg, scenario_spec(spec, s));
    ScenarioCost c;
    c.scenario = s;
    c.exact = total_cost(sched);
    c.big_o = big_o(c.exact);
    c.loop_order = sched.loop_order;
    out.push_back(std::move(c));
  }
  return out;
}

bool ValidationResult::ok() const { return error.empty(); }

std::vector<ValidationResult> validate(const Problem& problem, const std::vector<Algorithm>& algs,
                                       const ValidationOptions& opts) {
  bool sequence = !problem.sequence.empty();
  for (const auto& [i, extent] : problem.sequence.indices)
    if (!opts.sizes.count(extent)) sequence = false;
  SequenceSpec single = scenario_spec(problem.sequence, Scenario::Single);

  std::vector<ValidationResult> out;
  for (const auto& alg : algs) {
    ValidationResult r;
    r.algorithm = alg.name;
    try {
      ScheduledAlgorithm sched = schedule(alg, problem.sequence);
      for (int k = 0; k < opts.trials; ++k) {
        std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(k);
        ExecutionEnv env = random_instance(problem.ctx, single, opts.sizes, seed);
        DenseMatrix want = oracle(problem.equation, env);
        r.max_error = std::max(r.max_error, relative_error(execute(alg, env), want));
        if (!sequence) continue;
        ExecutionEnv senv = random_instance(problem.ctx, problem.sequence, opts.sizes, seed);
        auto wants = oracle(problem.equation, problem.sequence, senv);
        auto gots = execute(sched, senv);
        for (const auto& [slot, w] : wants) r.max_error = std::max(r.max_error, relative_error(gots.at(slot), w));
      }
    } catch (const Error& e) {
      r.error = e.what();
    }
    if (r.max_error > opts.tolerance && r.error.empty()) r.error = "exceeds tolerance";
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string kernels_line(const Algorithm& alg) {
  std::string out;
  for (const auto& k : alg.kernel_sequence()) out += (out.empty() ? "" : " ") + k;
  return out;
}

}  // namespace

std::string format_algorithms(const std::vector<Algorithm>& algs) {
  std::string out;
  for (const auto& alg : algs) {
    out += "Algorithm " + alg.name + ": " + kernels_line(alg) + "\n";
    std::string listing = alg.listing();
    std::size_t start = 0;
    while (start < listing.size()) {
      auto nl = listing.find('\n', start);
      out += "  " + listing.substr(start, nl - start) + "\n";
      start = nl + 1;
    }
    out += "\n";
  }
  return out;
}

std::string format_costs(const std::vector<Algorithm>& algs, const SequenceSpec& spec) {
  std::string out;
  for (const auto& alg : algs) {
    out += alg.name + ": " + kernels_line(alg) + "\n";
    for (const auto& c : scenario_costs(alg, spec)) {
      std::string loops;
      for (const auto& l : c.loop_order) loops += (loops.empty() ? "" : ",") + l;
      out += "  " + pad(std::string(scenario_name(c.scenario)), 7) + pad(c.big_o, 30) + c.exact.str();
      if (!loops.empty()) out += "  [loops " + loops + "]";
      out += "\n";
    }
  }
  return out;
}

std::string format_validation(const std::vector<ValidationResult>& results, const ValidationOptions& opts) {
  std::string out;
  std::size_t bad = 0;
  for (const auto& r : results) {
    if (r.ok()) continue;
    ++bad;
    out += "MISMATCH " + r.algorithm + ": max relative error " + sci(r.max_error);
    if (!r.error.empty()) out += " (" + r.error + ")";
    out += "\n";
  }
  std::string sizes;
  for (const auto& [k, v] : opts.sizes) sizes += (sizes.empty() ? "" : ",") + k + "=" + std::to_string(v);
  double worst = 0;
  for (const auto& r : results) worst = std::max(worst, r.max_error);
  if (bad == 0) {
    out += "all " + std::to_string(results.size()) + " algorithms match oracle";
  } else {
    out += std::to_string(bad) + " of " + std::to_string(results.size()) + " algorithms do not match oracle";
  }
  out += " (" + sizes + ", seed " + std::to_string(opts.seed) + ", " + std::to_string(opts.trials) +
         " instances, max relative error " + sci(worst) + ")\n";
  return out;
}

std::string emit_code(const Algorithm& alg, const SequenceSpec& spec, Scenario s, std::string_view target) {
  return emit(build_ast(schedule(alg, scenario_spec(spec, s))), target);
}

std::string json_report(const ReportInput& in) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = 1;
  const Problem& p = *in.problem;
  j["equation"] = p.equation.str();
  if (in.derivation) {
    const auto& st = in.derivation->stats;
    j["derivation"] = {{"algorithms_found", in.derivation->algorithms.size()},
                       {"nodes_created", st.nodes_created},
                       {"nodes_expanded", st.nodes_expanded},
                       {"duplicates", st.duplicates},
                       {"dead_ends", st.dead_ends},
                       {"leaves", st.leaves},
                       {"node_limit_hit", st.node_limit_hit}};
  }
  ordered_json algs = ordered_json::array();
  for (const auto& alg : in.algorithms) {
    ordered_json a;
    a["name"] = alg.name;
    a["kernels"] = alg.kernel_sequence();
    ordered_json stmts = ordered_json::array();
    for (const auto& s : alg.statements)
      stmts.push_back({{"text", statement_text(s)},
                       {"kernel", s.kernel},
                       {"variant", s.variant},
                       {"outputs", s.outputs},
                       {"cost", s.cost.str()}});
    a["statements"] = stmts;
    ordered_json costs;
    for (const auto& c : scenario_costs(alg, p.sequence)) {
      std::vector<std::string> leading;
      for (const auto& m : leading_terms(c.exact)) leading.push_back(monomial_str(m));
      costs[std::string(scenario_name(c.scenario))] = {
          {"exact", c.exact.str()}, {"big_o", c.big_o}, {"leading_terms", leading}, {"loop_order", c.loop_order}};
    }
    a["cost"] = costs;
    if (in.with_code) {
      ordered_json code;
      for (Scenario s : scenarios_of(p.sequence))
        code[std::string(scenario_name(s))] = emit_code(alg, p.sequence, s, in.target);
      a["code"] = code;
    }
    algs.push_back(std::move(a));
  }
  j["algorithms"] = algs;
  if (in.validation) {
    ordered_json v;
    if (in.validation_options) {
      v["sizes"] = in.validation_options->sizes;
      v["seed"] = in.validation_options->seed;
      v["trials"] = in.validation_options->trials;
      v["tolerance"] = in.validation_options->tolerance;
    }
    ordered_json rs = ordered_json::array();
    bool all = true;
    for (const auto& r : *in.validation) {
      rs.push_back({{"algorithm", r.algorithm}, {"max_relative_error", r.max_error}, {"ok", r.ok()},
                    {"error", r.error}});
      all = all && r.ok();
    }
    v["all_match"] = all;
    v["results"] = rs;
    j["validation"] = v;
  }
  return j.dump(2) + "\n";
}

}  // namespace lacomp
