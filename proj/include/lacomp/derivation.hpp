#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lacomp/context.hpp"
#include "lacomp/cost.hpp"
#include "lacomp/kernels.hpp"
#include "lacomp/rewrite.hpp"

namespace lacomp {

/// Raised when the search ends without reaching a leaf.
class NoAlgorithmError : public Error {
 public:
  using Error::Error;
};

/// Ordered kernel calls computing `output`. Temporaries are single-assignment.
struct Algorithm {
  std::string name;
  std::vector<KernelCall> statements;
  std::string output;
  PropertyContext ctx;  // inputs plus every temporary

  CostPolynomial cost() const;
  std::vector<std::string> kernel_sequence() const;
  /// "M := h*Phi + (1 - h)*id  (scal-add)" style listing, one line per statement.
  std::string listing() const;
};

/// "L*L' = M" for factorizations, "W := inv(L)*X" otherwise.
std::string statement_text(const KernelCall& call);

enum class InverseClass : std::uint8_t { SingleOperand, ExpressionInverse, None };

struct InverseTarget {
  InverseClass kind = InverseClass::None;
  Expr target;  // the inv(...) node
};

/// The inner-most inverse still to be processed. Inverses of diagonal,
/// triangular or orthonormal operands, and of scalars, count as processed.
InverseTarget classify_inverse(const Expr& e, const PropertyContext& ctx);

struct DerivationNode {
  Expr rhs;
  PropertyContext ctx;
  std::vector<KernelCall> statements;
  int depth = 0;
  int next_temp = 1;
  std::map<std::string, std::string> definitions;  // temporary -> expanded definition

  /// The remaining equation with every temporary expanded to its definition.
  std::string key() const;
  bool is_leaf() const { return rhs.is(NodeKind::Operand); }
};

struct DerivationLimits {
  int max_depth = 12;
  std::size_t max_nodes = 5000;
  std::size_t max_algorithms = 0;  // 0 keeps every leaf
  std::size_t top_k = 0;           // 0 keeps every ranked segment child
};

/// Ranked candidate: a segment with its kernel and occurrence count.
struct SegmentCandidate {
  Expr segment;
  int count = 0;
  KernelMatch match;
  CostPolynomial cost;
};

/// Point at which costs are compared for ordering (n=1000, p=10, others 100).
std::map<std::string, double> reference_point(const PropertyContext& ctx);

/// Stable order by occurrence count (desc), kernel cost at the reference
/// point (asc), catalog position (asc).
std::vector<SegmentCandidate> rank_segments(std::vector<SegmentCandidate> candidates,
                                            const PropertyContext& ctx, const Catalog& catalog);

/// Children of a non-leaf node; each adds one kernel call.
std::vector<DerivationNode> expand_node(const DerivationNode& node, const Catalog& catalog,
                                        const DerivationLimits& limits = {});

struct DerivationStats {
  std::size_t nodes_created = 0;
  std::size_t nodes_expanded = 0;
  std::size_t duplicates = 0;
  std::size_t dead_ends = 0;
  std::size_t leaves = 0;
  bool node_limit_hit = false;
};

struct DerivationResult {
  std::vector<Algorithm> algorithms;
  DerivationStats stats;
};

/// Breadth-first search from the target equation. Algorithms are ordered by
/// cost at the reference point, ties by discovery order. Throws
/// NoAlgorithmError when no leaf is reached within the limits.
DerivationResult derive(const Equation& eq, const PropertyContext& ctx,
                        const DerivationLimits& limits = {},
                        const Catalog& catalog = Catalog::defaults());

}  // namespace lacomp
