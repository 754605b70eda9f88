#include <doctest.h>

#include "lacomp/properties.hpp"
#include "support.hpp"

using namespace lacomp;
using lacomp::testing::canon;
using lacomp::testing::sample_context;
using P = Property;

TEST_CASE("implication closure") {
  PropertySet id = implication_closure(props({P::Identity}));
  for (P p : {P::Diagonal, P::OrthogonalSquare, P::SPD, P::Symmetric, P::FullRank, P::Square,
              P::LowerTriangular, P::UpperTriangular, P::OrthonormalColumns})
    CHECK(has(id, p));
  PropertySet diag = implication_closure(props({P::Diagonal}));
  CHECK(has(diag, P::LowerTriangular));
  CHECK(has(diag, P::UpperTriangular));
  CHECK(has(diag, P::Symmetric));
  CHECK_FALSE(has(diag, P::FullRank));
}

TEST_CASE("gram matrix of a tall full-rank operand is SPD") {
  auto ctx = sample_context();
  ctx.declare_operand("W", props({P::Matrix, P::FullRank}), {"n", "p"});
  CHECK(infer(canon("W'*W", ctx), ctx)[P::SPD] == Verdict::Holds);
  CHECK(infer(canon("W*W'", ctx), ctx)[P::SPD] != Verdict::Holds);
}

TEST_CASE("gram rule needs more rows than columns") {
  PropertyContext ctx;
  ctx.declare_size("n");
  ctx.declare_size("p");
  ctx.declare_operand("W", props({P::Matrix, P::FullRank}), {"n", "p"});
  CHECK(infer(canon("W'*W", ctx), ctx)[P::SPD] != Verdict::Holds);
  ctx.assume_greater("n", "p");
  CHECK(infer(canon("W'*W", ctx), ctx)[P::SPD] == Verdict::Holds);
}

TEST_CASE("shifted symmetric matrix") {
  auto ctx = sample_context();
  Expr m = canon("h*Phi + (1 - h)*id", ctx);
  Verdicts v = infer(m, ctx);
  CHECK(v[P::Symmetric] == Verdict::Holds);
  CHECK(v[P::SPD] == Verdict::Unknown);
  assert_expression(ctx, m, props({P::SPD}));
  CHECK(infer(m, ctx)[P::SPD] == Verdict::Holds);
}

TEST_CASE("assertion on an inverse applies to its operand") {
  auto ctx = sample_context();
  assert_expression(ctx, canon("inv(h*Phi + (1 - h)*id)", ctx), props({P::SPD}));
  CHECK(infer(canon("h*Phi + (1 - h)*id", ctx), ctx)[P::SPD] == Verdict::Holds);
}

TEST_CASE("transpose flips triangles") {
  auto ctx = sample_context();
  Verdicts v = infer(canon("L'", ctx), ctx);
  CHECK(v[P::UpperTriangular] == Verdict::Holds);
  CHECK(v[P::FullRank] == Verdict::Holds);
  CHECK(v[P::LowerTriangular] != Verdict::Holds);
}

TEST_CASE("inverse keeps structure") {
  auto ctx = sample_context();
  CHECK(infer(canon("inv(L)", ctx), ctx)[P::LowerTriangular] == Verdict::Holds);
  CHECK(infer(canon("inv(S)", ctx), ctx)[P::SPD] == Verdict::Holds);
  CHECK(infer(canon("inv(Z)", ctx), ctx)[P::OrthogonalSquare] == Verdict::Holds);
  CHECK(infer(canon("inv(D + id)", ctx), ctx)[P::Diagonal] == Verdict::Holds);
}

TEST_CASE("products of square full-rank operands are full rank") {
  auto ctx = sample_context();
  CHECK(infer(canon("L*U", ctx), ctx)[P::FullRank] == Verdict::Holds);
  CHECK(infer(canon("A*L", ctx), ctx)[P::FullRank] != Verdict::Holds);
  CHECK(infer(canon("L*L", ctx), ctx)[P::LowerTriangular] == Verdict::Holds);
}

TEST_CASE("unknown operands are context errors") {
  auto ctx = sample_context();
  CHECK_THROWS_AS(infer(parse_expression("Nope*A"), ctx), ContextError);
}

TEST_CASE("bare operands return at least their closure") {
  auto ctx = sample_context();
  for (const auto& [name, info] : ctx.operands()) {
    Verdicts v = infer(Expr::operand(name), ctx);
    CHECK(v.holds_all(implication_closure(info.properties)));
  }
}

TEST_CASE("adding properties never removes a verdict") {
  auto ctx = sample_context();
  auto richer = sample_context();
  richer.add_properties("A", props({P::Symmetric}));
  richer.add_properties("X", props({P::OrthonormalColumns}));
  for (const char* text : {"X'*X", "A + A'", "L*U", "inv(S)*A", "h*Phi + (1 - h)*id", "X'*A*X"}) {
    Verdicts poor = infer(canon(text, ctx), ctx);
    Verdicts rich = infer(canon(text, richer), richer);
    CHECK(rich.holds_all(poor.holds));
  }
}

TEST_CASE("eigendecomposition outputs") {
  auto ctx = sample_context();
  FactorPlan plan = factor_output_properties(Factorization::Eig, ctx.operand("Phi").properties, {"n", "n"}, ctx);
  REQUIRE(plan.outputs.size() == 2);
  CHECK(has(plan.outputs[0].properties, P::OrthogonalSquare));
  CHECK(has(plan.outputs[1].properties, P::Diagonal));
  CHECK(has(plan.outputs[1].properties, P::Square));
  CHECK(plan.reconstruct({"Z", "W"}) == parse_expression("Z*W*Z'"));
}

TEST_CASE("cholesky output") {
  auto ctx = sample_context();
  ctx.declare_operand("G", props({P::Matrix, P::SPD}), {"p", "p"});
  FactorPlan plan = factor_output_properties(Factorization::Cholesky, ctx.operand("G").properties, {"p", "p"}, ctx);
  REQUIRE(plan.outputs.size() == 1);
  for (P p : {P::LowerTriangular, P::FullRank, P::Square}) CHECK(has(plan.outputs[0].properties, p));
  CHECK(plan.outputs[0].shape == Shape{"p", "p"});
}

TEST_CASE("qr outputs") {
  auto ctx = sample_context();
  FactorPlan plan = factor_output_properties(Factorization::QR, ctx.operand("X").properties, {"n", "p"}, ctx);
  REQUIRE(plan.outputs.size() == 2);
  CHECK(has(plan.outputs[0].properties, P::OrthonormalColumns));
  CHECK(plan.outputs[0].shape == Shape{"n", "p"});
  for (P p : {P::UpperTriangular, P::Square, P::FullRank}) CHECK(has(plan.outputs[1].properties, p));
  CHECK(plan.outputs[1].shape == Shape{"p", "p"});
}

TEST_CASE("svd outputs") {
  auto ctx = sample_context();
  FactorPlan plan = factor_output_properties(Factorization::SVD, ctx.operand("X").properties, {"n", "p"}, ctx);
  REQUIRE(plan.outputs.size() == 3);
  CHECK(has(plan.outputs[0].properties, P::OrthonormalColumns));
  CHECK(has(plan.outputs[1].properties, P::Diagonal));
  CHECK(has(plan.outputs[2].properties, P::OrthonormalColumns));
}

TEST_CASE("non-viable factorization is an error") {
  auto ctx = sample_context();
  CHECK_THROWS_AS(factor_output_properties(Factorization::Cholesky, ctx.operand("A").properties, {"n", "n"}, ctx),
                  ContextError);
  CHECK_THROWS_AS(factor_output_properties(Factorization::Eig, ctx.operand("X").properties, {"n", "p"}, ctx),
                  ContextError);
}

TEST_CASE("dims") {
  auto ctx = sample_context();
  CHECK(dims(parse_expression("X'*y"), ctx) == Shape{"p", "1"});
  CHECK(dims(parse_expression("inv(S)"), ctx) == Shape{"n", "n"});
  CHECK(dims(parse_expression("h*X"), ctx) == Shape{"n", "p"});
  CHECK_THROWS_AS(dims(parse_expression("X*X"), ctx), DimensionError);
  CHECK_THROWS_AS(dims(parse_expression("X + y"), ctx), DimensionError);
  CHECK_THROWS_AS(dims(parse_expression("inv(X)"), ctx), DimensionError);
}
