#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "lacomp/context.hpp"
#include "lacomp/rewrite.hpp"
#include "lacomp/seqloop.hpp"

namespace lacomp {

/// A parsed problem file.
struct Problem {
  Equation equation;
  PropertyContext ctx;
  SequenceSpec sequence;
  std::map<std::string, std::int64_t> sizes;  // optional numeric sizes for validation
};

/// Line-oriented format; '#' starts a comment.
///
///   size n p
///   operand X n x p : Input Matrix FullRank
///   equation b = inv(X' * X) * X' * y
///   assert inv(h*Phi + (1 - h)*id) : SPD
///   assume rows(X) > cols(X)
///   index i m
///   varies X i
///   validate n=32 p=3 m=4 t=3
///
/// Every failure (syntax, undeclared operand, dimension mismatch) is
/// reported as a ParseError with the offending line.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::string& path);

/// Renders a problem back into the file format.
std::string to_text(const Problem& p);

}  // namespace lacomp
