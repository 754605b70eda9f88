#include "lacomp/seqloop.hpp"

#include <algorithm>

namespace lacomp {

const std::string& SequenceSpec::extent(const std::string& index) const {
  for (const auto& [i, e] : indices)
    if (i == index) return e;
  throw ContextError("unknown sequence index '" + index + "'");
}

std::set<std::string> SequenceSpec::variation(const std::string& operand) const {
  auto it = varies.find(operand);
  return it == varies.end() ? std::set<std::string>{} : it->second;
}

SequenceSpec SequenceSpec::restricted(const std::set<std::string>& keep) const {
  SequenceSpec out;
  for (const auto& ie : indices)
    if (keep.count(ie.first)) out.indices.push_back(ie);
  for (const auto& [op, idx] : varies) {
    std::set<std::string> k;
    for (const auto& i : idx)
      if (keep.count(i)) k.insert(i);
    out.varies[op] = k;
  }
  return out;
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Single: return "single";
    case Scenario::OneD: return "1D";
    case Scenario::TwoD: return "2D";
  }
  return "?";
}

SequenceSpec scenario_spec(const SequenceSpec& spec, Scenario s) {
  std::set<std::string> keep;
  if (s == Scenario::OneD && !spec.indices.empty()) keep.insert(spec.indices.front().first);
  if (s == Scenario::TwoD)
    for (const auto& [i, e] : spec.indices) keep.insert(i);
  return spec.restricted(keep);
}

std::vector<std::set<std::string>> index_deps(const Algorithm& alg, const SequenceSpec& spec) {
  std::map<std::string, std::set<std::string>> of;
  std::vector<std::set<std::string>> out;
  for (const auto& call : alg.statements) {
    std::set<std::string> d;
    for (const auto& r : call.reads()) {
      auto it = of.find(r);
      const std::set<std::string> v = it == of.end() ? spec.variation(r) : it->second;
      d.insert(v.begin(), v.end());
    }
    for (const auto& o : call.outputs) of[o] = d;
    out.push_back(std::move(d));
  }
  return out;
}

std::set<std::string> index_deps(std::size_t stmt, const Algorithm& alg, const SequenceSpec& spec) {
  return index_deps(alg, spec).at(stmt);
}

namespace {

// Nest for one loop order: each prefix-closed level gets its statements;
// a statement whose indices are not a prefix of the order runs in a loop
// of its own indices, placed before the first loop that needs it.
void build(LoopNode& node, const std::vector<std::string>& order, std::size_t depth,
           const std::vector<std::set<std::string>>& deps, const SequenceSpec& spec,
           const std::set<std::string>& bound) {
  // Statements belonging exactly to this level.
  for (std::size_t s = 0; s < deps.size(); ++s)
    if (deps[s] == bound) node.body.push_back({false, s, 0});
  if (depth >= order.size()) return;
  // Side loops: levels bound ∪ {k} for later indices k (skipping order[depth]),
  // covering statements that do not depend on order[depth].
  for (std::size_t k = depth + 1; k < order.size(); ++k) {
    std::set<std::string> lvl = bound;
    lvl.insert(order[k]);
    bool any = std::any_of(deps.begin(), deps.end(), [&](const auto& d) { return d == lvl; });
    if (!any) continue;
    LoopNode side;
    side.index = order[k];
    side.extent = spec.extent(order[k]);
    side.level = lvl;
    for (std::size_t s = 0; s < deps.size(); ++s)
      if (deps[s] == lvl) side.body.push_back({false, s, 0});
    node.children.push_back(std::move(side));
    node.body.push_back({true, 0, node.children.size() - 1});
  }
  std::set<std::string> lvl = bound;
  lvl.insert(order[depth]);
  bool needed = std::any_of(deps.begin(), deps.end(), [&](const auto& d) {
    return std::includes(d.begin(), d.end(), lvl.begin(), lvl.end());
  });
  if (!needed) return;
  LoopNode inner;
  inner.index = order[depth];
  inner.extent = spec.extent(order[depth]);
  inner.level = lvl;
  build(inner, order, depth + 1, deps, spec, lvl);
  node.children.push_back(std::move(inner));
  node.body.push_back({true, 0, node.children.size() - 1});
}

CostPolynomial nest_cost(const LoopNode& node, const Algorithm& alg, const SequenceSpec& spec) {
  CostPolynomial c;
  std::vector<std::string> ext;
  for (const auto& i : node.level) ext.push_back(spec.extent(i));
  for (const auto& item : node.body) {
    if (item.is_loop) {
      c += nest_cost(node.children[item.loop], alg, spec);
    } else {
      c += alg.statements[item.statement].cost.mul_by_extent(ext);
    }
  }
  return c;
}

}  // namespace

ScheduledAlgorithm schedule_with_order(const Algorithm& alg, const SequenceSpec& spec,
                                       const std::vector<std::string>& order) {
  ScheduledAlgorithm s;
  s.algorithm = alg;
  s.spec = spec;
  s.loop_order = order;
  s.deps = index_deps(alg, spec);
  build(s.root, order, 0, s.deps, spec, {});
  return s;
}

ScheduledAlgorithm schedule(const Algorithm& alg, const SequenceSpec& spec) {
  std::vector<std::string> order;
  for (const auto& [i, e] : spec.indices) order.push_back(i);
  ScheduledAlgorithm best = schedule_with_order(alg, spec, order);
  if (order.size() < 2) return best;
  auto point = reference_point(alg.ctx);
  double best_cost = total_cost(best).evaluate_double(point);
  std::vector<std::string> perm = order;
  std::sort(perm.begin(), perm.end());
  do {
    if (perm == order) continue;
    ScheduledAlgorithm cand = schedule_with_order(alg, spec, perm);
    double c = total_cost(cand).evaluate_double(point);
    if (c < best_cost) {
      best = std::move(cand);
      best_cost = c;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

CostPolynomial total_cost(const ScheduledAlgorithm& sched) {
  return nest_cost(sched.root, sched.algorithm, sched.spec);
}

CostPolynomial naive_cost(const Algorithm& alg, const SequenceSpec& spec) {
  std::vector<std::string> ext;
  for (const auto& [i, e] : spec.indices) ext.push_back(e);
  return alg.cost().mul_by_extent(ext);
}

}  // namespace lacomp
