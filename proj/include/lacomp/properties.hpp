#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lacomp/context.hpp"

namespace lacomp {

enum class Verdict : std::uint8_t { Unknown, Holds, Fails };

std::string_view verdict_name(Verdict v);

/// Tri-state property verdicts for one expression.
struct Verdicts {
  PropertySet holds;
  PropertySet fails;

  Verdict operator[](Property p) const {
    if (has(holds, p)) return Verdict::Holds;
    if (has(fails, p)) return Verdict::Fails;
    return Verdict::Unknown;
  }
  bool holds_all(const PropertySet& s) const { return (holds & s) == s; }
};

/// An extension rule: when `applies` is true for a (canonical) expression,
/// every property in `implies` holds for it.
struct InferenceRule {
  std::string name;
  std::function<bool(const Expr&, const PropertyContext&)> applies;
  PropertySet implies;
};

/// Registry of extension rules consulted after the structural propagation.
/// The default registry carries the Gram-matrix rule (A'A is SPD for a
/// full-rank A with more rows than columns) in its congruence form.
class InferenceRules {
 public:
  void add(InferenceRule rule) { rules_.push_back(std::move(rule)); }
  const std::vector<InferenceRule>& rules() const { return rules_; }
  static const InferenceRules& defaults();

 private:
  std::vector<InferenceRule> rules_;
};

/// Property verdicts for a canonical expression. Sound: a Holds verdict is
/// true on every conforming instantiation. Unknown operands raise ContextError.
Verdicts infer(const Expr& e, const PropertyContext& ctx,
               const InferenceRules& rules = InferenceRules::defaults());

inline bool holds(const Expr& e, const PropertyContext& ctx, Property p) {
  return infer(e, ctx)[p] == Verdict::Holds;
}

/// True when rows(s) >= cols(s) is known from the shape and size relations.
bool known_tall_or_square(const Shape& s, const PropertyContext& ctx);

enum class Factorization : std::uint8_t { Cholesky, QR, Eig, SVD };

std::string_view factorization_name(Factorization f);
std::optional<Factorization> factorization_from_name(std::string_view name);

/// One output factor of a factorization.
struct FactorOutput {
  std::string role;  // L; Q, R; Z, W; U, S, V
  PropertySet properties;
  Shape shape;
};

/// Output factors and the product that reconstructs the factored operand,
/// expressed over operand names supplied by the caller.
struct FactorPlan {
  std::vector<FactorOutput> outputs;
  std::function<Expr(const std::vector<std::string>&)> reconstruct;
};

/// Output properties per factor. Throws ContextError when the factorization
/// is not viable for an operand with these properties and shape.
FactorPlan factor_output_properties(Factorization kind, const PropertySet& operand,
                                    const Shape& shape, const PropertyContext& ctx);

}  // namespace lacomp
