#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lacomp/cost.hpp"
#include "lacomp/derivation.hpp"
#include "lacomp/problem.hpp"
#include "lacomp/seqloop.hpp"

namespace lacomp {

struct ScenarioCost {
  Scenario scenario = Scenario::Single;
  CostPolynomial exact;
  std::string big_o;
  std::vector<std::string> loop_order;
};

/// Scenarios the sequence supports: single always, 1D with one index, 2D with two.
std::vector<Scenario> scenarios_of(const SequenceSpec& spec);

/// Scheduled cost of `alg` in every supported scenario.
std::vector<ScenarioCost> scenario_costs(const Algorithm& alg, const SequenceSpec& spec);

struct ValidationOptions {
  std::map<std::string, std::int64_t> sizes;
  std::uint64_t seed = 1;
  int trials = 20;
  double tolerance = 1e-8;
};

struct ValidationResult {
  std::string algorithm;
  double max_error = 0;
  std::string error;  // failure or tolerance breach; empty when it matched
  bool ok() const;
};

/// Runs every algorithm, single and scheduled over the whole sequence, on
/// `trials` random instances and compares with the oracle.
std::vector<ValidationResult> validate(const Problem& problem, const std::vector<Algorithm>& algs,
                                       const ValidationOptions& opts);

std::string format_algorithms(const std::vector<Algorithm>& algs);
std::string format_costs(const std::vector<Algorithm>& algs, const SequenceSpec& spec);
std::string format_validation(const std::vector<ValidationResult>& results, const ValidationOptions& opts);

/// Emitted code of `alg` for one scenario.
std::string emit_code(const Algorithm& alg, const SequenceSpec& spec, Scenario s,
                      std::string_view target = "pseudo");

struct ReportInput {
  const Problem* problem = nullptr;
  const DerivationResult* derivation = nullptr;
  std::vector<Algorithm> algorithms;            // as reported (after --top)
  bool with_code = false;
  std::string target = "pseudo";
  const std::vector<ValidationResult>* validation = nullptr;
  const ValidationOptions* validation_options = nullptr;
};

/// Machine-readable export; carries "schema": 1.
std::string json_report(const ReportInput& in);

}  // namespace lacomp
