#include "lacomp/context.hpp"

#include <algorithm>
#include <array>

namespace lacomp {

namespace {

constexpr std::array<std::string_view, kPropertyCount> kNames = {
    "Identity",  "Diagonal",      "LowerTriangular", "UpperTriangular", "Symmetric",
    "SPD",       "OrthonormalColumns", "OrthogonalSquare", "FullRank", "Square",
    "Input",     "Output",        "Matrix",          "Vector",          "Scalar",
};

}  // namespace

std::string_view property_name(Property p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Property> property_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Property>(i);
  }
  // Short aliases.
  if (name == "Orthonormal") return Property::OrthonormalColumns;
  if (name == "Orthogonal") return Property::OrthogonalSquare;
  if (name == "InputOperand") return Property::InputOperand;
  if (name == "OutputOperand") return Property::OutputOperand;
  return std::nullopt;
}

std::string to_string(const PropertySet& s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < kPropertyCount; ++i) {
    if (!s.test(i)) continue;
    if (!first) out += ", ";
    out += kNames[i];
    first = false;
  }
  return out + "}";
}

PropertySet implication_closure(PropertySet s) {
  using P = Property;
  for (;;) {
    PropertySet before = s;
    if (has(s, P::Identity)) {
      add(s, P::Diagonal);
      add(s, P::OrthogonalSquare);
      add(s, P::SPD);
    }
    if (has(s, P::SPD)) {
      add(s, P::Symmetric);
      add(s, P::FullRank);
      add(s, P::Square);
    }
    if (has(s, P::Diagonal)) {
      add(s, P::LowerTriangular);
      add(s, P::UpperTriangular);
      add(s, P::Symmetric);
    }
    if (has(s, P::OrthogonalSquare)) {
      add(s, P::OrthonormalColumns);
      add(s, P::FullRank);
      add(s, P::Square);
    }
    if (has(s, P::Symmetric) || has(s, P::LowerTriangular) || has(s, P::UpperTriangular))
      add(s, P::Square);
    if (s == before) return s;
  }
}

std::string to_string(const Shape& s) {
  if (s.is_polymorphic()) return "k x k";
  return s.rows + " x " + s.cols;
}

void PropertyContext::declare_size(const std::string& symbol) {
  if (!is_size(symbol)) sizes_.push_back(symbol);
}

bool PropertyContext::is_size(const std::string& symbol) const {
  return symbol == "1" || std::find(sizes_.begin(), sizes_.end(), symbol) != sizes_.end();
}

void PropertyContext::declare_operand(const std::string& name, PropertySet properties,
                                      Shape shape) {
  if (!is_size(shape.rows) || !is_size(shape.cols))
    throw ContextError("operand '" + name + "' uses an undeclared size symbol (" +
                       to_string(shape) + ")");
  using P = Property;
  if (shape.is_scalar()) {
    add(properties, P::Scalar);
  } else if (shape.is_vector()) {
    add(properties, P::Vector);
  } else {
    add(properties, P::Matrix);
  }
  if (shape.is_square() && !shape.is_scalar()) add(properties, P::Square);
  operands_[name] = OperandInfo{implication_closure(properties), std::move(shape)};
}

void PropertyContext::add_properties(const std::string& name, PropertySet extra) {
  auto it = operands_.find(name);
  if (it == operands_.end()) throw ContextError("unknown operand '" + name + "'");
  it->second.properties = implication_closure(it->second.properties | extra);
}

const OperandInfo& PropertyContext::operand(const std::string& name) const {
  auto it = operands_.find(name);
  if (it == operands_.end()) throw ContextError("unknown operand '" + name + "'");
  return it->second;
}

void PropertyContext::assume_greater(const std::string& larger, const std::string& smaller) {
  if (!is_size(larger) || !is_size(smaller))
    throw ContextError("size relation uses undeclared symbol: " + larger + " > " + smaller);
  if (larger == smaller) throw ContextError("size relation " + larger + " > " + smaller + " is empty");
  greater_.emplace_back(larger, smaller);
}

bool PropertyContext::known_greater(const std::string& a, const std::string& b) const {
  // Transitive search over the recorded relations.
  std::vector<std::string> stack{a};
  std::set<std::string> seen{a};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    for (const auto& [hi, lo] : greater_) {
      if (hi != cur) continue;
      if (lo == b) return true;
      if (seen.insert(lo).second) stack.push_back(lo);
    }
  }
  return false;
}

bool PropertyContext::known_distinct(const std::string& a, const std::string& b) const {
  return known_greater(a, b) || known_greater(b, a);
}

void PropertyContext::add_assertion(const Expr& e, PropertySet properties) {
  for (auto& [key, set] : asserted_) {
    if (key == e) {
      set = implication_closure(set | properties);
      return;
    }
  }
  asserted_.emplace_back(e, implication_closure(properties));
}

PropertySet PropertyContext::asserted(const Expr& canonical) const {
  for (const auto& [key, set] : asserted_) {
    if (key == canonical) return set;
  }
  return {};
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void mismatch(const Expr& e, const std::string& why) {
  throw DimensionError("dimension mismatch in '" + e.str() + "': " + why);
}

// Unifies two extents where "" is a wildcard.
bool unify(const std::string& a, const std::string& b, std::string& out) {
  if (a.empty()) {
    out = b;
    return true;
  }
  if (b.empty() || a == b) {
    out = a;
    return true;
  }
  return false;
}

}  // namespace

Shape dims(const Expr& e, const PropertyContext& ctx) {
  switch (e.kind()) {
    case NodeKind::Operand:
      return ctx.operand(e.name()).shape;
    case NodeKind::Scalar:
      return {"1", "1"};
    case NodeKind::Identity:
      return {"", ""};
    case NodeKind::Negate:
      return dims(e.child(), ctx);
    case NodeKind::Transpose: {
      Shape s = dims(e.child(), ctx);
      return {s.cols, s.rows};
    }
    case NodeKind::Inverse: {
      Shape s = dims(e.child(), ctx);
      if (!s.is_square()) mismatch(e, "inverse of non-square " + to_string(s));
      return s;
    }
    case NodeKind::Plus: {
      Shape acc{"", ""};
      bool any_scalar = false;
      bool any_matrix = false;
      for (const auto& t : e.children()) {
        Shape s = dims(t, ctx);
        if (s.is_scalar()) {
          any_scalar = true;
        } else {
          any_matrix = true;
        }
        std::string r, c;
        if (!unify(acc.rows, s.rows, r) || !unify(acc.cols, s.cols, c))
          mismatch(e, "terms of shape " + to_string(acc) + " and " + to_string(s));
        acc = {r, c};
      }
      if (any_scalar && any_matrix) mismatch(e, "scalar added to a matrix");
      if (acc.is_polymorphic() && !acc.cols.empty()) acc.rows = acc.cols;
      return acc;
    }
    case NodeKind::Times: {
      std::optional<Shape> acc;
      bool saw_identity = false;
      for (const auto& f : e.children()) {
        Shape s = dims(f, ctx);
        if (s.is_scalar()) continue;
        if (s.is_polymorphic()) {
          saw_identity = true;
          continue;
        }
        if (!acc) {
          acc = s;
          continue;
        }
        if (acc->cols != s.rows)
          mismatch(e, "cannot multiply " + to_string(*acc) + " by " + to_string(s) +
                          " (at factor '" + f.str() + "')");
        acc->cols = s.cols;
      }
      if (acc) return *acc;
      if (saw_identity) return {"", ""};
      return {"1", "1"};
    }
  }
  return {"1", "1"};
}

}  // namespace lacomp
