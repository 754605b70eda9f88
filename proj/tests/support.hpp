#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "lacomp/derivation.hpp"
#include "lacomp/problem.hpp"
#include "lacomp/rewrite.hpp"

namespace lacomp::testing {

inline const Problem& gwas() {
  static const Problem p = load_problem(LACOMP_PROBLEM_DIR "/gwas.prob");
  return p;
}

inline const DerivationResult& gwas_derivation() {
  static const DerivationResult r = derive(gwas().equation, gwas().ctx);
  return r;
}

inline const std::vector<std::string> kCholGwas = {"scal-add", "potrf", "trsm", "syrk", "potrf",
                                                   "trsv",     "gemv",  "trsv", "trsv"};
inline const std::vector<std::string> kQrGwas = {"scal-add", "potrf", "trsm", "geqrf", "trsv", "gemv", "trsv"};
inline const std::vector<std::string> kEigGwas = {"syev", "scal-add", "gemm", "scal", "gemm",
                                                  "geqrf", "gemv",    "gemv", "gemv", "trsv"};

inline const Algorithm* find_by_kernels(const std::vector<Algorithm>& algs, const std::vector<std::string>& ks) {
  auto it = std::find_if(algs.begin(), algs.end(), [&](const Algorithm& a) { return a.kernel_sequence() == ks; });
  return it == algs.end() ? nullptr : &*it;
}

inline const Algorithm& golden(const std::vector<std::string>& ks) {
  const Algorithm* a = find_by_kernels(gwas_derivation().algorithms, ks);
  if (!a) throw Error("golden algorithm not derived");
  return *a;
}

inline Expr canon(const std::string& text, const PropertyContext& ctx) {
  return canonicalize(parse_expression(text), ctx);
}

// n > p sizes; A, B, C general n x n; L lower, U upper; Q orthonormal n x p;
// R upper p x p; Z orthogonal n x n; S SPD n x n; X full rank n x p; y n x 1;
// h scalar.
inline PropertyContext sample_context() {
  using P = Property;
  PropertyContext ctx;
  ctx.declare_size("n");
  ctx.declare_size("p");
  ctx.declare_operand("A", props({P::Matrix}), {"n", "n"});
  ctx.declare_operand("B", props({P::Matrix}), {"n", "n"});
  ctx.declare_operand("C", props({P::Matrix}), {"n", "n"});
  ctx.declare_operand("L", props({P::Matrix, P::LowerTriangular, P::FullRank}), {"n", "n"});
  ctx.declare_operand("U", props({P::Matrix, P::UpperTriangular, P::FullRank}), {"n", "n"});
  ctx.declare_operand("Q", props({P::Matrix, P::OrthonormalColumns}), {"n", "p"});
  ctx.declare_operand("R", props({P::Matrix, P::UpperTriangular, P::FullRank}), {"p", "p"});
  ctx.declare_operand("Z", props({P::Matrix, P::OrthogonalSquare}), {"n", "n"});
  ctx.declare_operand("D", props({P::Matrix, P::Diagonal}), {"n", "n"});
  ctx.declare_operand("S", props({P::Matrix, P::SPD}), {"n", "n"});
  ctx.declare_operand("Phi", props({P::Matrix, P::Symmetric}), {"n", "n"});
  ctx.declare_operand("X", props({P::Matrix, P::FullRank}), {"n", "p"});
  ctx.declare_operand("y", props({P::Vector}), {"n", "1"});
  ctx.declare_operand("h", props({P::Scalar}), {"1", "1"});
  ctx.assume_greater("n", "p");
  return ctx;
}

}  // namespace lacomp::testing
