#include <doctest.h>

#include "lacomp/seqloop.hpp"
#include "support.hpp"

using namespace lacomp;
using lacomp::testing::gwas;
using Set = std::set<std::string>;

namespace {

std::size_t statement_index(const Algorithm& a, const std::string& output) {
  for (std::size_t i = 0; i < a.statements.size(); ++i)
    for (const auto& o : a.statements[i].outputs)
      if (o == output) return i;
  throw Error("no statement writes " + output);
}

// Enclosing loop indices of every statement, outer first.
void nest_of(const LoopNode& node, std::vector<std::string> path, std::map<std::size_t, std::vector<std::string>>& out) {
  if (!node.index.empty()) path.push_back(node.index);
  for (const auto& item : node.body) {
    if (item.is_loop) {
      nest_of(node.children[item.loop], path, out);
    } else {
      out[item.statement] = path;
    }
  }
}

std::map<std::size_t, std::vector<std::string>> nests(const ScheduledAlgorithm& s) {
  std::map<std::size_t, std::vector<std::string>> out;
  nest_of(s.root, {}, out);
  return out;
}

}  // namespace

TEST_CASE("scenario specs") {
  const SequenceSpec& spec = gwas().sequence;
  CHECK(scenario_spec(spec, Scenario::Single).empty());
  auto one = scenario_spec(spec, Scenario::OneD);
  REQUIRE(one.indices.size() == 1);
  CHECK(one.indices[0].first == "i");
  CHECK(one.variation("X") == Set{"i"});
  CHECK(one.variation("y").empty());
  CHECK(scenario_spec(spec, Scenario::TwoD).indices.size() == 2);
}

TEST_CASE("index dependences follow the reads transitively") {
  const Algorithm& eig = lacomp::testing::golden(lacomp::testing::kEigGwas);
  const SequenceSpec& spec = gwas().sequence;
  CHECK(index_deps(statement_index(eig, "Z"), eig, spec).empty());
  CHECK(index_deps(statement_index(eig, "D"), eig, spec) == Set{"j"});
  CHECK(index_deps(statement_index(eig, "K"), eig, spec) == Set{"i"});
  CHECK(index_deps(statement_index(eig, "b"), eig, spec) == Set{"i", "j"});

  const Algorithm& chol = lacomp::testing::golden(lacomp::testing::kCholGwas);
  CHECK(index_deps(statement_index(chol, "M"), chol, spec) == Set{"j"});
  CHECK(index_deps(statement_index(chol, "W"), chol, spec) == Set{"i", "j"});
  auto all = index_deps(chol, spec);
  CHECK(all.size() == chol.statements.size());
}

TEST_CASE("eigendecomposition algorithm in two dimensions") {
  const Algorithm& eig = lacomp::testing::golden(lacomp::testing::kEigGwas);
  auto s = schedule(eig, gwas().sequence);
  auto n = nests(s);
  CHECK(n.at(statement_index(eig, "Z")).empty());
  CHECK(n.at(statement_index(eig, "K")) == std::vector<std::string>{"i"});
  CHECK(n.at(statement_index(eig, "D")) == std::vector<std::string>{"j"});
  CHECK(n.at(statement_index(eig, "b")).size() == 2);
  CHECK(s.loop_order == std::vector<std::string>{"i", "j"});
}

TEST_CASE("cholesky algorithm with one trait hoists the shared factorization") {
  const Algorithm& chol = lacomp::testing::golden(lacomp::testing::kCholGwas);
  auto s = schedule(chol, scenario_spec(gwas().sequence, Scenario::OneD));
  auto n = nests(s);
  CHECK(n.at(statement_index(chol, "M")).empty());
  CHECK(n.at(statement_index(chol, "L")).empty());
  CHECK(n.at(statement_index(chol, "W")) == std::vector<std::string>{"i"});
  CHECK(s.loop_order == std::vector<std::string>{"i"});
}

TEST_CASE("a single instance has no loops") {
  for (const auto& a : lacomp::testing::gwas_derivation().algorithms) {
    auto s = schedule(a, {});
    CHECK(s.root.children.empty());
    CHECK(s.root.body.size() == a.statements.size());
    CHECK(total_cost(s) == a.cost());
  }
}

TEST_CASE("statements keep their data-dependence order") {
  for (const auto& a : lacomp::testing::gwas_derivation().algorithms) {
    auto s = schedule(a, gwas().sequence);
    std::vector<std::size_t> order;
    std::function<void(const LoopNode&)> walk = [&](const LoopNode& node) {
      for (const auto& item : node.body) {
        if (item.is_loop) {
          walk(node.children[item.loop]);
        } else {
          order.push_back(item.statement);
        }
      }
    };
    walk(s.root);
    REQUIRE(order.size() == a.statements.size());
    std::map<std::string, std::size_t> written;
    for (std::size_t k = 0; k < order.size(); ++k)
      for (const auto& o : a.statements[order[k]].outputs) written[o] = k;
    for (std::size_t k = 0; k < order.size(); ++k)
      for (const auto& r : a.statements[order[k]].reads())
        if (written.count(r)) CHECK(written[r] < k);
  }
}

TEST_CASE("the cheaper loop order is kept") {
  const Algorithm& eig = lacomp::testing::golden(lacomp::testing::kEigGwas);
  const SequenceSpec& spec = gwas().sequence;
  auto best = schedule(eig, spec);
  auto ij = schedule_with_order(eig, spec, {"i", "j"});
  auto ji = schedule_with_order(eig, spec, {"j", "i"});
  std::map<std::string, double> at{{"n", 1000}, {"p", 10}, {"m", 100}, {"t", 100}};
  double b = total_cost(best).evaluate_double(at);
  CHECK(b <= total_cost(ij).evaluate_double(at));
  CHECK(b <= total_cost(ji).evaluate_double(at));
}

TEST_CASE("hoisting never costs more than the naive nest") {
  std::map<std::string, double> at{{"n", 1000}, {"p", 10}, {"m", 100}, {"t", 100}};
  for (const auto& a : lacomp::testing::gwas_derivation().algorithms) {
    auto s = schedule(a, gwas().sequence);
    CHECK(total_cost(s).evaluate_double(at) <= naive_cost(a, gwas().sequence).evaluate_double(at));
  }
}

TEST_CASE("naive cost multiplies every statement") {
  const Algorithm& chol = lacomp::testing::golden(lacomp::testing::kCholGwas);
  CHECK(naive_cost(chol, gwas().sequence) == chol.cost().mul_by_extent({"m", "t"}));
}
