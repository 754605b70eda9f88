#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lacomp/context.hpp"

namespace lacomp {

/// Normal form: Plus/Times flattened; literals folded; scalar factors
/// hoisted to the front in a fixed order; Trans pushed to operands (and
/// inside Inv); Negate turned into a -1 coefficient; Trans(Trans) and
/// Inv(Inv) removed; identity factors absorbed by matrix products.
/// Matrix factor order is never changed. Throws DimensionError.
Expr canonicalize(const Expr& e, const PropertyContext& ctx);

/// Rewrites a canonical expression to fixpoint under the matrix rules
/// (symmetric transposes, inverse distribution over square products,
/// orthonormal cancellations, X^-1 X, common-factor grouping in sums).
/// Stops early once the node budget is exceeded.
Expr simplify(const Expr& e, const PropertyContext& ctx, std::size_t node_budget = 4096);

/// Canonical, simplified transpose.
Expr transpose_of(const Expr& e, const PropertyContext& ctx);

/// Canonical transpose that only applies the symmetric-operand rule.
/// Cheap enough for use inside property inference.
Expr light_transpose(const Expr& e, const PropertyContext& ctx);

/// Variants of `e` where the identity occurrences inside one distinct
/// enclosing term are rewritten to Z*Z' or Z'*Z for every square orthogonal
/// operand Z of `e`. Empty when no such operand exists. Results are canonical.
std::vector<Expr> expand_identity(const Expr& e, const PropertyContext& ctx);

/// As above, with the orthogonal operands taken from an enclosing `scope`.
std::vector<Expr> expand_identity(const Expr& e, const PropertyContext& ctx, const Expr& scope);

struct SegmentCount {
  Expr segment;  // orientation of the first occurrence
  int count = 0;
};

/// Contiguous product windows (length >= 2) and sum nodes of `e`, counted
/// modulo transposition, ordered by count (desc), then `saving` (desc),
/// then first occurrence.
std::vector<SegmentCount> find_segments(
    const Expr& e, const PropertyContext& ctx,
    const std::function<double(const Expr&)>& saving = nullptr);

/// Replaces every occurrence of `segment` (as a product window or a whole
/// node) by `with`, and every occurrence of its transpose by with'.
Expr replace_segment(const Expr& e, const Expr& segment, const Expr& with,
                     const PropertyContext& ctx);

/// output := rhs.
struct Equation {
  std::string output;
  Expr rhs;

  std::string str() const { return output + " = " + rhs.str(); }
};

/// Checks that the output is declared, absent from the right-hand side and
/// conforming with it. Throws ContextError or DimensionError.
void validate_equation(const Equation& eq, const PropertyContext& ctx);

/// Registers an asserted property on a canonicalized expression. An
/// assertion on inv(x) of inversion-invariant properties also applies to x.
void assert_expression(PropertyContext& ctx, const Expr& e, PropertySet properties);

}  // namespace lacomp
