#include <doctest.h>

#include <sstream>

#include "lacomp/codegen.hpp"
#include "support.hpp"

using namespace lacomp;
using lacomp::testing::gwas;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string code(const std::vector<std::string>& kernels, Scenario s) {
  return emit(build_ast(schedule(lacomp::testing::golden(kernels), scenario_spec(gwas().sequence, s))));
}

std::size_t line_of(const std::vector<std::string>& lines, const std::string& needle) {
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].find(needle) != std::string::npos) return i;
  return lines.size();
}

std::size_t indent(const std::string& l) { return l.find_first_not_of(' '); }

const std::map<std::string, std::int64_t> kSizes{{"n", 16}, {"p", 3}, {"m", 3}, {"t", 2}};

}  // namespace

TEST_CASE("single-instance Cholesky code follows the listing") {
  const Algorithm& chol = lacomp::testing::golden(lacomp::testing::kCholGwas);
  auto lines = lines_of(code(lacomp::testing::kCholGwas, Scenario::Single));
  REQUIRE(lines.size() == 11);
  CHECK(lines[0] == "# algorithm " + chol.name);
  CHECK(lines[1] == "alloc b : p x 1");
  for (std::size_t k = 0; k < 9; ++k) {
    CHECK(lines[k + 2].find(chol.statements[k].label() + "(") != std::string::npos);
    CHECK(lines[k + 2].find("  # cost: " + chol.statements[k].cost.str()) != std::string::npos);
  }
  CHECK(lines[3] == "L := potrf(A=M)  # cost: 1/3 n^3");
}

TEST_CASE("an empty algorithm has a header and the result only") {
  Algorithm empty;
  empty.name = "empty";
  empty.output = "b";
  empty.ctx = gwas().ctx;
  CHECK(emit(build_ast(schedule(empty, {}))) == "# algorithm empty\nalloc b : p x 1\n");
}

TEST_CASE("eigendecomposition code hoists syev out of both loops") {
  auto lines = lines_of(code(lacomp::testing::kEigGwas, Scenario::TwoD));
  std::size_t syev = line_of(lines, "syev(");
  std::size_t first_loop = line_of(lines, "for ");
  REQUIRE(syev < lines.size());
  CHECK(syev < first_loop);
  CHECK(indent(lines[syev]) == 0);

  std::size_t i_loop = line_of(lines, "for i in 1..m:");
  std::size_t j_loop = line_of(lines, "for j in 1..t:");
  REQUIRE(i_loop < lines.size());
  REQUIRE(j_loop < lines.size());
  CHECK(line_of(lines, "X_i := slice(X, i)") == i_loop + 1);
  std::size_t h = line_of(lines, "h_j := slice(h, j)");
  std::size_t y = line_of(lines, "y_j := slice(y, j)");
  CHECK(h == j_loop + 1);
  CHECK(y == j_loop + 2);
  CHECK(line_of(lines, "alloc b[i,j] : p x 1") == 1);
}

TEST_CASE("one-dimensional code has a single loop over i") {
  auto text = code(lacomp::testing::kCholGwas, Scenario::OneD);
  auto lines = lines_of(text);
  std::size_t loops = 0;
  for (const auto& l : lines) loops += l.rfind("for ", indent(l)) == indent(l);
  CHECK(loops == 1);
  CHECK(line_of(lines, "for i in 1..m:") < lines.size());
  CHECK(line_of(lines, "potrf(") < line_of(lines, "for i in 1..m:"));
}

TEST_CASE("single-instance code has no loops") {
  for (const auto& a : lacomp::testing::gwas_derivation().algorithms)
    CHECK(emit(build_ast(schedule(a, {}))).find("for ") == std::string::npos);
}

TEST_CASE("emitted code reads back to the same text") {
  for (const auto& ks : {lacomp::testing::kCholGwas, lacomp::testing::kQrGwas, lacomp::testing::kEigGwas})
    for (Scenario s : {Scenario::Single, Scenario::OneD, Scenario::TwoD}) {
      std::string text = code(ks, s);
      CHECK(emit(parse_pseudo(text)) == text);
    }
}

TEST_CASE("read-back code computes bitwise the same results") {
  const Problem& p = gwas();
  for (const auto& ks : {lacomp::testing::kCholGwas, lacomp::testing::kQrGwas, lacomp::testing::kEigGwas}) {
    auto sched = schedule(lacomp::testing::golden(ks), p.sequence);
    CodeAST ast = build_ast(sched);
    CodeAST back = parse_pseudo(emit(ast));
    ExecutionEnv a = random_instance(p.ctx, p.sequence, kSizes, 17);
    ExecutionEnv b = a;
    ExecutionEnv c = a;
    auto direct = execute(sched, a);
    auto from_ast = run(ast, p.sequence, b);
    auto from_text = run(back, p.sequence, c);
    REQUIRE(direct.size() == 6);
    for (const auto& [slot, m] : direct) {
      CHECK(from_ast.at(slot) == m);
      CHECK(from_text.at(slot) == m);
    }
    CHECK(b.flops.total() == a.flops.total());
  }
}

TEST_CASE("unknown targets and malformed code") {
  CodeAST ast = build_ast(schedule(lacomp::testing::golden(lacomp::testing::kQrGwas), {}));
  CHECK_THROWS_AS(emit(ast, "c"), Error);
  CHECK_THROWS_AS(parse_pseudo("# algorithm x\nalloc b : p x 1\nb := nope(A=X)  # cost: n\n"), ParseError);
  try {
    parse_pseudo("# algorithm x\nalloc b : p x 1\nfor i in 1..m\n");
    FAIL("missing colon accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
