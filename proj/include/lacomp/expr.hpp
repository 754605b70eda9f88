#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace lacomp {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);

/// Base class for every error raised by the compiler.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the infix reader; carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  /// The text without the location prefix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

enum class NodeKind : std::uint8_t {
  Operand,
  Scalar,
  Identity,
  Plus,
  Times,
  Negate,
  Inverse,
  Transpose,
};

std::string_view kind_name(NodeKind k);

struct Node;

/// Immutable matrix-algebra expression. Cheap to copy; shares structure.
class Expr {
 public:
  Expr();  // the scalar literal 0

  static Expr operand(std::string name);
  static Expr scalar(Rational value);
  static Expr scalar(std::int64_t value) { return scalar(Rational(value)); }
  static Expr identity();
  static Expr plus(std::vector<Expr> terms);
  static Expr times(std::vector<Expr> factors);
  static Expr negate(Expr e);
  static Expr inv(Expr e);
  static Expr trans(Expr e);

  NodeKind kind() const;
  bool is(NodeKind k) const { return kind() == k; }
  const std::string& name() const;     // Operand only
  const Rational& value() const;       // Scalar only
  std::span<const Expr> children() const;
  const Expr& child() const;           // unary nodes
  std::size_t size() const;            // node count
  std::size_t hash() const;

  /// Infix rendering; re-readable by parse_expression.
  std::string str() const;
  /// Infix rendering with operand names passed through `rename`.
  std::string str(const std::function<std::string(const std::string&)>& rename) const;

  /// Structural total order (kind, payload, children).
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b);

  bool contains(const Expr& sub) const;
  void collect_operands(std::vector<std::string>& out) const;
  std::vector<std::string> operands() const;

  /// Replace every operand named `name` by `with`. No canonicalization.
  Expr substitute(const std::string& name, const Expr& with) const;
  /// Bottom-up structural map.
  Expr map(const std::function<Expr(const Expr&)>& post) const;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

/// Reads an infix expression: + - * ' inv() trans() id, integer and p/q
/// literals, parentheses. Floating literals are rejected.
Expr parse_expression(std::string_view text, int line = 1, int column_offset = 0);

}  // namespace lacomp
