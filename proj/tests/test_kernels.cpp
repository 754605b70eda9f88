#include <doctest.h>

#include "lacomp/kernels.hpp"
#include "lacomp/refexec.hpp"
#include "support.hpp"

using namespace lacomp;
using lacomp::testing::canon;
using lacomp::testing::sample_context;
using P = Property;

namespace {

std::string first_kernel(const std::string& text, const PropertyContext& ctx) {
  auto m = Catalog::defaults().best_match(canon(text, ctx), ctx);
  return m ? m->pattern->label() : "";
}

CostPolynomial poly(const std::string& text) { return parse_cost(text); }

}  // namespace

TEST_CASE("default catalog parses") {
  const Catalog& c = Catalog::defaults();
  CHECK(c.kernels().size() >= 13);
  CHECK(c.factorizations().size() == 4);
  CHECK(c.params().at("c_eig") == Rational(9));
  CHECK(c.params().at("c_svd") == Rational(21));
}

TEST_CASE("shifted matrix matches scal-add") {
  auto ctx = sample_context();
  CHECK(first_kernel("h*Phi + (1 - h)*id", ctx) == "scal-add[dense]");
  CHECK(first_kernel("h*D + (1 - h)*id", ctx) == "scal-add[diag]");
}

TEST_CASE("triangular solve with many right-hand sides matches trsm") {
  auto ctx = sample_context();
  CHECK(first_kernel("inv(L)*X", ctx) == "trsm[left]");
  CHECK(first_kernel("inv(L)*y", ctx) == "trsv");
}

TEST_CASE("gram product matches syrk") {
  auto ctx = sample_context();
  CHECK(first_kernel("X'*X", ctx) == "syrk[tn]");
  CHECK(first_kernel("X'*y", ctx) == "gemv[n]");
  CHECK(first_kernel("A*B", ctx) == "gemm");
  CHECK(first_kernel("inv(D)*X", ctx) == "scal[left-inv]");
}

TEST_CASE("guards reject wrong operands") {
  auto ctx = sample_context();
  for (const auto& m : Catalog::defaults().match(canon("inv(A)*X", ctx), ctx))
    CHECK(m.pattern->name != "trsm");
  CHECK(Catalog::defaults().match(canon("X", ctx), ctx).empty());
}

TEST_CASE("viable factorizations") {
  auto ctx = sample_context();
  auto spd = viable_factorizations("S", ctx);
  CHECK(spd == std::vector<Factorization>{Factorization::Cholesky, Factorization::QR, Factorization::Eig,
                                          Factorization::SVD});
  CHECK(viable_factorizations("Phi", ctx) == std::vector<Factorization>{Factorization::Eig, Factorization::SVD});
  CHECK(viable_factorizations("X", ctx) == std::vector<Factorization>{Factorization::QR, Factorization::SVD});
  CHECK(viable_factorizations("A", ctx) == std::vector<Factorization>{Factorization::SVD});
  CHECK(viable_factorizations("L", ctx).empty());
  CHECK(viable_factorizations("D", ctx).empty());
  CHECK(viable_factorizations("Z", ctx).empty());
  CHECK(viable_factorizations("y", ctx).empty());
}

TEST_CASE("kernel costs") {
  auto ctx = sample_context();
  const Catalog& c = Catalog::defaults();
  auto cost = [&](const std::string& text) { return c.cost_of(*c.best_match(canon(text, ctx), ctx), ctx); };
  CHECK(cost("inv(L)*X") == poly("p n^2"));
  CHECK(cost("inv(L)*y") == poly("n^2"));
  CHECK(cost("X'*X") == poly("p^2 n"));
  CHECK(cost("X'*y") == poly("2 p n"));
  CHECK(cost("A*B") == poly("2 n^3"));
  CHECK(cost("A*X") == poly("2 p n^2"));
  CHECK(cost("h*Phi + (1 - h)*id") == poly("2 n^2"));
  CHECK(cost("h*D + (1 - h)*id") == poly("2 n"));
  CHECK(cost("inv(D)*X") == poly("p n"));
  CHECK(c.factorization_cost(Factorization::Cholesky, {"n", "n"}) == poly("1/3 n^3"));
  CHECK(c.factorization_cost(Factorization::QR, {"n", "p"}) == poly("2 p^2 n - 2/3 p^3"));
  CHECK(c.factorization_cost(Factorization::Eig, {"n", "n"}) == poly("9 n^3"));
  CHECK(c.factorization_cost(Factorization::SVD, {"n", "n"}) == poly("21 n^3"));
}

TEST_CASE("potrf on a 1x1 operand keeps the exact rational") {
  CostPolynomial c = Catalog::defaults().factorization_cost(Factorization::Cholesky, {"1", "1"});
  CHECK(c.evaluate({}) == Rational(1, 3));
}

TEST_CASE("counted trsm and gemv agree with the catalog") {
  const Catalog& c = Catalog::defaults();
  auto ctx = sample_context();
  CostPolynomial trsm = c.cost_of(*c.best_match(canon("inv(L)*X", ctx), ctx), ctx);
  CostPolynomial gemv = c.cost_of(*c.best_match(canon("X'*y", ctx), ctx), ctx);
  for (std::int64_t n : {4, 8, 16})
    for (std::int64_t p : {4, 8, 16}) {
      FlopCounter fc;
      DenseMatrix l = random_matrix(props({P::LowerTriangular, P::FullRank}), n, n, 3);
      DenseMatrix x = random_matrix({}, n, p, 4);
      dense::triangular_solve(l, x, true, &fc, "trsm");
      CHECK(Rational(static_cast<std::int64_t>(fc.total())) == trsm.evaluate({{"n", n}, {"p", p}}));
      FlopCounter fg;
      dense::gemm(x.transpose(), random_matrix({}, n, 1, 5), &fg, "gemv");
      CHECK(Rational(static_cast<std::int64_t>(fg.total())) == gemv.evaluate({{"n", n}, {"p", p}}));
    }
}

TEST_CASE("custom catalog") {
  Catalog c = Catalog::parse(R"(
param c_eig 4
factorization syev eig
  cost c_eig rows(A) rows(A) rows(A)
kernel gemm: A*B
  hole A atom
  hole B atom
  cost 2 rows(A) cols(A) cols(B)
)");
  CHECK(c.kernels().size() == 1);
  CHECK(c.factorization_cost(Factorization::Eig, {"n", "n"}) == poly("4 n^3"));
}

TEST_CASE("malformed catalogs are rejected") {
  CHECK_THROWS_AS(Catalog::parse("kernel gemm A*B\n"), KernelError);
  CHECK_THROWS_AS(Catalog::parse("kernel gemm: A*B\n  hole A cube\n"), KernelError);
  CHECK_THROWS_AS(Catalog::parse("kernel gemm: A*B\n  hole A atom\n  hole B atom\n  cost 2 rows(C)\n"), KernelError);
  CHECK_THROWS_AS(Catalog::parse("factorization lu lu\n"), KernelError);
  CHECK_THROWS_AS(Catalog::parse("kernel gemm: A*B\n  hole A atom Shiny\n"), KernelError);
}
