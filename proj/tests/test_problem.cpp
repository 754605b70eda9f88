#include <doctest.h>

#include "lacomp/problem.hpp"
#include "support.hpp"

using namespace lacomp;
using P = Property;

namespace {

int error_line(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("the GWAS problem file") {
  const Problem& p = lacomp::testing::gwas();
  CHECK(p.equation.output == "b");
  CHECK(p.equation.rhs == parse_expression("inv(X' * inv(h*Phi + (1 - h)*id) * X) * X' * "
                                            "inv(h*Phi + (1 - h)*id) * y"));
  CHECK(has(p.ctx.operand("X").properties, P::FullRank));
  CHECK(has(p.ctx.operand("X").properties, P::InputOperand));
  CHECK(has(p.ctx.operand("Phi").properties, P::Symmetric));
  CHECK(has(p.ctx.operand("b").properties, P::OutputOperand));
  CHECK(p.ctx.operand("X").shape == Shape{"n", "p"});
  CHECK(p.ctx.known_greater("n", "p"));
  REQUIRE(p.ctx.assertions().size() >= 1);
  CHECK(holds(canonicalize(parse_expression("h*Phi + (1 - h)*id"), p.ctx), p.ctx, P::SPD));
  CHECK(p.sequence.indices == std::vector<std::pair<std::string, std::string>>{{"i", "m"}, {"j", "t"}});
  CHECK(p.sequence.variation("X") == std::set<std::string>{"i"});
  CHECK(p.sequence.variation("y") == std::set<std::string>{"j"});
  CHECK(p.sizes.at("n") == 32);
}

TEST_CASE("a minimal problem") {
  Problem p = parse_problem(
      "size n\n"
      "operand A n x n : Input Matrix SPD\n"
      "operand y n x 1 : Input Vector\n"
      "operand b n x 1 : Output Vector\n"
      "equation b = inv(A)*y\n");
  CHECK(p.sequence.empty());
  CHECK(p.sizes.empty());
  auto r = derive(p.equation, p.ctx);
  CHECK(r.algorithms.front().kernel_sequence() == std::vector<std::string>{"potrf", "trsv", "trsv"});
}

TEST_CASE("problem text round trips") {
  const Problem& p = lacomp::testing::gwas();
  Problem again = parse_problem(to_text(p));
  CHECK(again.equation.rhs == p.equation.rhs);
  CHECK(to_text(again) == to_text(p));
}

TEST_CASE("errors carry the offending line") {
  CHECK(error_line("size n\noperand A n x n : Matrix\nassert inv(B) : SPD\n") == 3);
  CHECK(error_line("size n\noperand A n x q : Matrix\n") == 2);
  CHECK(error_line("size n p\noperand X n x p : Matrix\noperand b n x 1 : Output Vector\nequation b = X*X\n") == 4);
  CHECK(error_line("size n\noperand A n x n : Matrix Shiny\n") == 2);
  CHECK(error_line("size n\nbogus line\n") == 2);
  CHECK(error_line("size n\noperand A n x n : Matrix\nequation b = inv(A\n") == 3);
  CHECK(error_line("size n\noperand A n x n : Matrix\noperand b n x n : Output Matrix\nequation b = b*A\n") == 4);
  CHECK(error_line("size n\noperand A n x n : Matrix\nvaries A i\n") == 3);
}

TEST_CASE("comments and blank lines are ignored") {
  Problem p = parse_problem(
      "# header\n\n"
      "size n   # one size\n"
      "operand A n x n : Input Matrix SPD\n"
      "operand b n x n : Output Matrix\n"
      "equation b = inv(A)  # explicit inverse\n");
  CHECK(p.equation.rhs == parse_expression("inv(A)"));
}
