#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lacomp/context.hpp"
#include "lacomp/cost.hpp"
#include "lacomp/properties.hpp"

namespace lacomp {

/// Malformed catalog text or an unbound cost symbol.
class KernelError : public Error {
 public:
  using Error::Error;
};

enum class HoleKind : std::uint8_t { Scalar, Atom };

/// One guard clause: at least one of `any_of` holds (or, negated, none does).
struct GuardClause {
  bool negated = false;
  std::vector<Property> any_of;
};

struct HoleSpec {
  std::string name;
  HoleKind kind = HoleKind::Atom;
  std::vector<GuardClause> guards;
};

/// `lhs != rhs` (or `==`) over hole names, checked after binding.
struct Constraint {
  Expr lhs;
  Expr rhs;
  bool equal = false;
};

/// coeff * prod(rows/cols of holes).
struct CostTerm {
  Rational coeff;
  std::vector<std::pair<std::string, bool>> extents;  // (hole, true = rows)
};

struct KernelPattern {
  std::string name;
  std::string variant;
  Expr pattern;
  std::vector<HoleSpec> holes;
  std::vector<Constraint> constraints;
  std::vector<CostTerm> cost;

  std::string label() const { return variant.empty() ? name : name + "[" + variant + "]"; }
  const HoleSpec* hole(const std::string& n) const;
};

struct FactorizationEntry {
  std::string name;  // potrf, geqrf, syev, svd
  Factorization kind;
  std::vector<CostTerm> cost;  // over the hole A
};

using Bindings = std::map<std::string, Expr>;

struct KernelMatch {
  const KernelPattern* pattern = nullptr;
  Bindings bindings;
  Expr segment;             // the matched orientation
  bool transposed = false;  // matched the transpose of the queried expression
};

/// A bound kernel invocation inside an algorithm.
struct KernelCall {
  std::string kernel;
  std::string variant;
  std::optional<Factorization> factorization;
  Bindings inputs;                   // hole -> expression; {"A": operand} for factorizations
  std::vector<std::string> outputs;  // temporaries written
  Expr value;                        // computed segment, or the factored operand
  CostPolynomial cost;

  std::string label() const { return variant.empty() ? kernel : kernel + "[" + variant + "]"; }
  /// Operand names read by the call.
  std::vector<std::string> reads() const;
};

class Catalog {
 public:
  /// Reads the declarative catalog format (see default_text()).
  static Catalog parse(std::string_view text);
  static const Catalog& defaults();
  static std::string_view default_text();

  const std::vector<KernelPattern>& kernels() const { return kernels_; }
  const std::vector<FactorizationEntry>& factorizations() const { return factorizations_; }
  const FactorizationEntry& factorization(Factorization kind) const;
  const std::map<std::string, Rational>& params() const { return params_; }

  /// Every (pattern, binding) for `e` and for its transpose, catalog order,
  /// each pattern tried on `e` before its transpose.
  std::vector<KernelMatch> match(const Expr& e, const PropertyContext& ctx) const;
  /// The first entry of match(), which fixes the orientation.
  std::optional<KernelMatch> best_match(const Expr& e, const PropertyContext& ctx) const;

  CostPolynomial cost_of(const KernelMatch& m, const PropertyContext& ctx) const;
  CostPolynomial factorization_cost(Factorization kind, const Shape& shape) const;

 private:
  std::vector<KernelPattern> kernels_;
  std::vector<FactorizationEntry> factorizations_;
  std::map<std::string, Rational> params_;
};

/// Matches `pattern` against one expression. Exposed for tests.
std::optional<Bindings> match_pattern(const KernelPattern& pattern, const Expr& e,
                                      const PropertyContext& ctx);

inline std::vector<KernelMatch> match_kernel(const Expr& e, const PropertyContext& ctx,
                                             const Catalog& catalog = Catalog::defaults()) {
  return catalog.match(e, ctx);
}

/// Factorizations applicable to a matrix operand; empty for diagonal,
/// triangular, orthonormal, vector and scalar operands.
std::vector<Factorization> viable_factorizations(const std::string& operand,
                                                 const PropertyContext& ctx);

}  // namespace lacomp
