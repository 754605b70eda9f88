#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lacomp/cost.hpp"
#include "lacomp/derivation.hpp"

namespace lacomp {

/// Sequence indices with symbolic extents and per-operand variation sets.
struct SequenceSpec {
  std::vector<std::pair<std::string, std::string>> indices;  // (index, extent), declaration order
  std::map<std::string, std::set<std::string>> varies;       // operand -> indices

  bool empty() const { return indices.empty(); }
  const std::string& extent(const std::string& index) const;
  std::set<std::string> variation(const std::string& operand) const;
  /// Keeps only the given indices (in declaration order).
  SequenceSpec restricted(const std::set<std::string>& keep) const;
};

enum class Scenario : std::uint8_t { Single, OneD, TwoD };

std::string_view scenario_name(Scenario s);

/// Single: no indices; OneD: the first declared index; TwoD: all indices.
SequenceSpec scenario_spec(const SequenceSpec& spec, Scenario s);

/// Index dependences of every statement: the union of the variation sets of
/// all inputs reachable through its reads.
std::vector<std::set<std::string>> index_deps(const Algorithm& alg, const SequenceSpec& spec);

/// Dependence set of statement `stmt`.
std::set<std::string> index_deps(std::size_t stmt, const Algorithm& alg, const SequenceSpec& spec);

/// A loop (or the top level when index is empty) holding statements and
/// nested loops in execution order.
struct LoopNode {
  struct Item {
    bool is_loop = false;
    std::size_t statement = 0;  // when !is_loop
    std::size_t loop = 0;       // index into children when is_loop
  };
  std::string index;
  std::string extent;
  std::set<std::string> level;  // indices bound at this level
  std::vector<Item> body;
  std::vector<LoopNode> children;
};

struct ScheduledAlgorithm {
  Algorithm algorithm;
  SequenceSpec spec;
  std::vector<std::string> loop_order;        // outer first
  std::vector<std::set<std::string>> deps;    // per statement
  LoopNode root;
};

/// Places each statement at the shallowest level covering its dependences.
/// Statements depending only on an inner index run in their own loop and
/// keep one value per index; both loop orders are costed and the cheaper
/// one is kept (ties: first declared index outermost).
ScheduledAlgorithm schedule(const Algorithm& alg, const SequenceSpec& spec);

/// Schedule with a fixed loop order (outer first).
ScheduledAlgorithm schedule_with_order(const Algorithm& alg, const SequenceSpec& spec,
                                       const std::vector<std::string>& order);

/// Sum over statements of cost times the extents of its level.
CostPolynomial total_cost(const ScheduledAlgorithm& sched);

/// Every statement inside every loop, without hoisting.
CostPolynomial naive_cost(const Algorithm& alg, const SequenceSpec& spec);

}  // namespace lacomp
