#include <doctest.h>

#include "lacomp/cost.hpp"
#include "lacomp/seqloop.hpp"
#include "support.hpp"

using namespace lacomp;

namespace {

std::vector<std::string> leading(const CostPolynomial& c) {
  std::vector<std::string> out;
  for (const auto& m : leading_terms(c)) out.push_back(monomial_str(m));
  return out;
}

CostPolynomial scheduled(const std::vector<std::string>& kernels, Scenario s) {
  const auto& g = lacomp::testing::gwas();
  return total_cost(schedule(lacomp::testing::golden(kernels), scenario_spec(g.sequence, s)));
}

}  // namespace

TEST_CASE("ring operations") {
  CostPolynomial c = parse_cost("1/3 n^3 + p n^2");
  CHECK(c.mul_by_extent({"m"}) == parse_cost("1/3 m n^3 + m p n^2"));
  CHECK(c + CostPolynomial{} == c);
  CHECK((c - c).is_zero());
  CHECK(CostPolynomial::symbol("n") * CostPolynomial::symbol("n") == parse_cost("n^2"));
  CHECK(Rational(3) * parse_cost("1/3 n") == parse_cost("n"));
  CHECK(parse_cost("p n^2").evaluate({{"n", 10}, {"p", 2}}) == Rational(200));
  CHECK(CostPolynomial::symbol("1") == CostPolynomial::constant(Rational(1)));
}

TEST_CASE("substitution") {
  CostPolynomial c = parse_cost("n^2 + p");
  CHECK(c.substitute({{"n", parse_cost("2 p")}}) == parse_cost("4 p^2 + p"));
}

TEST_CASE("unbound symbols") { CHECK_THROWS_AS(parse_cost("n^2").evaluate({{"p", 1}}), Error); }

TEST_CASE("printing and reading back") {
  for (const char* text : {"1/3 n^3 + 2 m p n^2", "-2/3 p^3 + 2 p^2 n", "0", "7", "m t p^2 n + 3 n"}) {
    CostPolynomial c = parse_cost(text);
    CHECK(parse_cost(c.str()) == c);
  }
  CHECK(parse_cost("0").is_zero());
  CHECK_THROWS_AS(parse_cost("n^"), Error);
  CHECK_THROWS_AS(parse_cost("+ n"), Error);
  CHECK_THROWS_AS(parse_cost("n n n ^ 2 +"), Error);
}

TEST_CASE("leading terms of the scheduled costs") {
  using lacomp::testing::kCholGwas;
  using lacomp::testing::kEigGwas;
  using lacomp::testing::kQrGwas;
  CHECK(leading(scheduled(kCholGwas, Scenario::OneD)) == std::vector<std::string>{"n^3", "m p n^2"});
  CHECK(leading(scheduled(kCholGwas, Scenario::TwoD)) == std::vector<std::string>{"t n^3", "m t p n^2"});
  CHECK(leading(scheduled(kQrGwas, Scenario::Single)) == std::vector<std::string>{"n^3"});
  CHECK(leading(scheduled(kEigGwas, Scenario::TwoD)) == std::vector<std::string>{"n^3", "m p n^2", "m t p^2 n"});
}

TEST_CASE("leading terms of single monomials and the zero polynomial") {
  CHECK(leading(parse_cost("5 m p n^2")) == std::vector<std::string>{"m p n^2"});
  CHECK_THROWS_AS(leading_terms(CostPolynomial{}), Error);
}

TEST_CASE("dominance follows the regime") {
  const Regime& r = default_regime();
  auto mono = [](const std::string& t) { return parse_cost(t).terms().begin()->first; };
  CHECK(dominates(mono("n^3"), mono("p^3"), r));
  CHECK(dominates(mono("m n^2"), mono("m p n"), r));
  CHECK_FALSE(dominates(mono("n^3"), mono("m p n^2"), r));
  CHECK_FALSE(dominates(mono("m p n^2"), mono("n^3"), r));
  CHECK(big_o(parse_cost("1/3 n^3 + m p n^2 + m p^2 n")) == "O(n^3 + m p n^2)");
}

TEST_CASE("asymptotic comparison") {
  using lacomp::testing::kCholGwas;
  using lacomp::testing::kEigGwas;
  using lacomp::testing::kQrGwas;
  CHECK(compare_asymptotic(scheduled(kEigGwas, Scenario::TwoD), scheduled(kCholGwas, Scenario::TwoD)) ==
        Asymptotic::Less);
  CHECK(compare_asymptotic(scheduled(kCholGwas, Scenario::TwoD), scheduled(kEigGwas, Scenario::TwoD)) ==
        Asymptotic::Greater);
  CHECK(compare_asymptotic(scheduled(kQrGwas, Scenario::OneD), scheduled(kCholGwas, Scenario::OneD)) ==
        Asymptotic::Equal);
  CostPolynomial c = parse_cost("n^3 + m p n^2");
  CHECK(compare_asymptotic(c, c) == Asymptotic::Equal);
  CHECK(compare_asymptotic(parse_cost("n^3"), parse_cost("m p n^2")) == Asymptotic::Incomparable);
}
