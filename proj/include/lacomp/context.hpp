#pragma once

#include <bitset>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lacomp/expr.hpp"

namespace lacomp {

enum class Property : std::uint8_t {
  Identity,
  Diagonal,
  LowerTriangular,
  UpperTriangular,
  Symmetric,
  SPD,
  OrthonormalColumns,
  OrthogonalSquare,
  FullRank,
  Square,
  InputOperand,
  OutputOperand,
  Matrix,
  Vector,
  Scalar,
};

inline constexpr std::size_t kPropertyCount = 15;

using PropertySet = std::bitset<kPropertyCount>;

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);
std::string to_string(const PropertySet& s);

inline PropertySet props(std::initializer_list<Property> ps) {
  PropertySet s;
  for (Property p : ps) s.set(static_cast<std::size_t>(p));
  return s;
}
inline bool has(const PropertySet& s, Property p) { return s.test(static_cast<std::size_t>(p)); }
inline void add(PropertySet& s, Property p) { s.set(static_cast<std::size_t>(p)); }

/// Closes a set under the structural implications
/// (Identity => Diagonal, OrthogonalSquare, SPD; SPD => Symmetric, FullRank, Square; ...).
PropertySet implication_closure(PropertySet s);

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ContextError : public Error {
 public:
  using Error::Error;
};

/// Symbolic dimension: a declared size symbol, "1", or "" for the
/// polymorphic square extent of the identity symbol.
struct Shape {
  std::string rows;
  std::string cols;

  bool is_scalar() const { return rows == "1" && cols == "1"; }
  bool is_vector() const { return cols == "1" && rows != "1" && !rows.empty(); }
  bool is_polymorphic() const { return rows.empty(); }
  bool is_square() const { return rows == cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

struct OperandInfo {
  PropertySet properties;  // declared, closed under implications
  Shape shape;
};

/// Operand properties, symbolic shapes, size relations and asserted
/// expression properties. Built once, then read concurrently.
class PropertyContext {
 public:
  void declare_size(const std::string& symbol);
  const std::vector<std::string>& size_symbols() const { return sizes_; }
  bool is_size(const std::string& symbol) const;

  /// Shape-derived properties (Square/Vector/Scalar/Matrix) are added here.
  void declare_operand(const std::string& name, PropertySet properties, Shape shape);
  void add_properties(const std::string& name, PropertySet extra);
  bool has_operand(const std::string& name) const { return operands_.contains(name); }
  const OperandInfo& operand(const std::string& name) const;
  const std::map<std::string, OperandInfo>& operands() const { return operands_; }

  /// Records `larger > smaller` between size symbols.
  void assume_greater(const std::string& larger, const std::string& smaller);
  bool known_greater(const std::string& a, const std::string& b) const;
  bool known_distinct(const std::string& a, const std::string& b) const;
  const std::vector<std::pair<std::string, std::string>>& size_relations() const {
    return greater_;
  }

  /// `e` must already be canonical; callers go through assert_expression().
  void add_assertion(const Expr& e, PropertySet properties);
  PropertySet asserted(const Expr& canonical) const;
  const std::vector<std::pair<Expr, PropertySet>>& assertions() const { return asserted_; }
  void replace_assertions(std::vector<std::pair<Expr, PropertySet>> a) { asserted_ = std::move(a); }

 private:
  std::vector<std::string> sizes_;
  std::map<std::string, OperandInfo> operands_;
  std::vector<std::pair<std::string, std::string>> greater_;
  std::vector<std::pair<Expr, PropertySet>> asserted_;
};

/// Symbolic dimensions of `e`. Throws DimensionError naming the offending
/// subtree, ContextError for undeclared operands.
Shape dims(const Expr& e, const PropertyContext& ctx);

inline bool is_scalar_valued(const Expr& e, const PropertyContext& ctx) {
  return dims(e, ctx).is_scalar();
}

}  // namespace lacomp
