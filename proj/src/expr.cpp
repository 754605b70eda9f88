#include "lacomp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lacomp {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

std::string_view kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Operand: return "operand";
    case NodeKind::Scalar: return "scalar";
    case NodeKind::Identity: return "identity";
    case NodeKind::Plus: return "plus";
    case NodeKind::Times: return "times";
    case NodeKind::Negate: return "negate";
    case NodeKind::Inverse: return "inv";
    case NodeKind::Transpose: return "trans";
  }
  return "?";
}

struct Node {
  NodeKind kind;
  std::string name;
  Rational value;
  std::vector<Expr> children;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::shared_ptr<const Node> make_node(NodeKind kind, std::string name, Rational value,
                                      std::vector<Expr> children) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->name = std::move(name);
  n->value = value;
  n->children = std::move(children);
  std::size_t h = std::hash<int>{}(static_cast<int>(kind));
  h = mix(h, std::hash<std::string>{}(n->name));
  h = mix(h, std::hash<std::int64_t>{}(value.numerator()));
  h = mix(h, std::hash<std::int64_t>{}(value.denominator()));
  for (const auto& c : n->children) {
    h = mix(h, c.hash());
    n->size += c.size();
  }
  n->hash = h;
  return n;
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> z = make_node(NodeKind::Scalar, "", Rational(0), {});
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::operand(std::string name) {
  return Expr(make_node(NodeKind::Operand, std::move(name), Rational(0), {}));
}
Expr Expr::scalar(Rational value) { return Expr(make_node(NodeKind::Scalar, "", value, {})); }
Expr Expr::identity() {
  static const Expr id(make_node(NodeKind::Identity, "", Rational(0), {}));
  return id;
}
Expr Expr::plus(std::vector<Expr> terms) {
  return Expr(make_node(NodeKind::Plus, "", Rational(0), std::move(terms)));
}
Expr Expr::times(std::vector<Expr> factors) {
  return Expr(make_node(NodeKind::Times, "", Rational(0), std::move(factors)));
}
Expr Expr::negate(Expr e) { return Expr(make_node(NodeKind::Negate, "", Rational(0), {std::move(e)})); }
Expr Expr::inv(Expr e) { return Expr(make_node(NodeKind::Inverse, "", Rational(0), {std::move(e)})); }
Expr Expr::trans(Expr e) {
  return Expr(make_node(NodeKind::Transpose, "", Rational(0), {std::move(e)}));
}

NodeKind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
const Rational& Expr::value() const { return node_->value; }
std::span<const Expr> Expr::children() const { return node_->children; }
const Expr& Expr::child() const { return node_->children.front(); }
std::size_t Expr::size() const { return node_->size; }
std::size_t Expr::hash() const { return node_->hash; }

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case NodeKind::Operand:
      if (auto c = a.name().compare(b.name()); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case NodeKind::Scalar:
      if (a.value() == b.value()) return std::strong_ordering::equal;
      return a.value() < b.value() ? std::strong_ordering::less : std::strong_ordering::greater;
    case NodeKind::Identity:
      return std::strong_ordering::equal;
    default:
      break;
  }
  auto ca = a.children();
  auto cb = b.children();
  for (std::size_t i = 0; i < std::min(ca.size(), cb.size()); ++i) {
    if (auto c = ca[i] <=> cb[i]; c != 0) return c;
  }
  return ca.size() <=> cb.size();
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  return (a <=> b) == 0;
}

bool Expr::contains(const Expr& sub) const {
  if (*this == sub) return true;
  return std::any_of(children().begin(), children().end(),
                     [&](const Expr& c) { return c.contains(sub); });
}

void Expr::collect_operands(std::vector<std::string>& out) const {
  if (is(NodeKind::Operand)) {
    if (std::find(out.begin(), out.end(), name()) == out.end()) out.push_back(name());
    return;
  }
  for (const auto& c : children()) c.collect_operands(out);
}

std::vector<std::string> Expr::operands() const {
  std::vector<std::string> out;
  collect_operands(out);
  return out;
}

Expr Expr::map(const std::function<Expr(const Expr&)>& post) const {
  if (children().empty()) return post(*this);
  std::vector<Expr> kids;
  kids.reserve(children().size());
  bool changed = false;
  for (const auto& c : children()) {
    kids.push_back(c.map(post));
    changed = changed || !(kids.back().node_ == c.node_);
  }
  if (!changed) return post(*this);
  return post(Expr(make_node(kind(), name(), value(), std::move(kids))));
}

Expr Expr::substitute(const std::string& target, const Expr& with) const {
  return map([&](const Expr& e) {
    if (e.is(NodeKind::Operand) && e.name() == target) return with;
    return e;
  });
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Plus: return 1;
    case NodeKind::Times: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Scalar: return e.value() < Rational(0) ? 3 : (e.value().denominator() != 1 ? 2 : 4);
    default: return 4;
  }
}

using Renamer = std::function<std::string(const std::string&)>;

void print(const Expr& e, std::ostream& os, const Renamer& rename);

void print_wrapped(const Expr& e, int min_prec, std::ostream& os, const Renamer& rename) {
  if (precedence(e) < min_prec) {
    os << '(';
    print(e, os, rename);
    os << ')';
  } else {
    print(e, os, rename);
  }
}

// Times whose leading literal is negative: prints the magnitude.
bool negative_term(const Expr& t, Expr& magnitude) {
  if (t.is(NodeKind::Scalar) && t.value() < Rational(0)) {
    magnitude = Expr::scalar(-t.value());
    return true;
  }
  if (t.is(NodeKind::Negate)) {
    magnitude = t.child();
    return true;
  }
  if (t.is(NodeKind::Times) && t.children()[0].is(NodeKind::Scalar) && t.children()[0].value() < Rational(0)) {
    std::vector<Expr> rest(t.children().begin() + 1, t.children().end());
    Rational c = -t.children()[0].value();
    if (c != Rational(1)) rest.insert(rest.begin(), Expr::scalar(c));
    magnitude = rest.size() == 1 ? rest[0] : Expr::times(std::move(rest));
    return true;
  }
  return false;
}

void print(const Expr& e, std::ostream& os, const Renamer& rename) {
  switch (e.kind()) {
    case NodeKind::Operand:
      os << (rename ? rename(e.name()) : e.name());
      return;
    case NodeKind::Scalar:
      os << to_string(e.value());
      return;
    case NodeKind::Identity:
      os << "id";
      return;
    case NodeKind::Plus: {
      bool first = true;
      for (const auto& t : e.children()) {
        Expr mag;
        if (!first && negative_term(t, mag)) {
          os << " - ";
          print_wrapped(mag, 2, os, rename);
        } else {
          if (!first) os << " + ";
          print_wrapped(t, 2, os, rename);
        }
        first = false;
      }
      return;
    }
    case NodeKind::Times: {
      auto f = e.children();
      std::size_t start = 0;
      if (f.size() > 1 && f[0].is(NodeKind::Scalar) && f[0].value() == Rational(-1)) {
        os << '-';
        start = 1;
      }
      for (std::size_t i = start; i < f.size(); ++i) {
        if (i > start) os << '*';
        print_wrapped(f[i], 3, os, rename);
      }
      return;
    }
    case NodeKind::Negate:
      os << '-';
      print_wrapped(e.child(), 3, os, rename);
      return;
    case NodeKind::Inverse:
      os << "inv(";
      print(e.child(), os, rename);
      os << ')';
      return;
    case NodeKind::Transpose:
      print_wrapped(e.child(), 4, os, rename);
      os << '\'';
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::ostringstream os;
  print(*this, os, nullptr);
  return os.str();
}

std::string Expr::str(const Renamer& rename) const {
  std::ostringstream os;
  print(*this, os, rename);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  Reader(std::string_view text, int line, int col_offset)
      : text_(text), line_(line), col_offset_(col_offset) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1 + col_offset_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    std::vector<Expr> terms;
    terms.push_back(term());
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(Expr::negate(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : Expr::plus(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors;
    factors.push_back(unary());
    while (accept('*')) factors.push_back(unary());
    return factors.size() == 1 ? factors[0] : Expr::times(std::move(factors));
  }

  Expr unary() {
    if (accept('-')) return Expr::negate(unary());
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (accept('\'')) e = Expr::trans(e);
    return e;
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      fail("floating literals are not allowed; use integers or p/q");
    try {
      return std::stoll(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      fail("integer literal out of range");
    }
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t num = integer();
      std::size_t save = pos_;
      if (accept('/')) {
        skip_ws();
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          std::int64_t den = integer();
          if (den == 0) fail("division by zero in literal");
          return Expr::scalar(Rational(num, den));
        }
        pos_ = save;
        fail("'/' is only allowed between integer literals");
      }
      return Expr::scalar(num);
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string ident(text_.substr(start, pos_ - start));
      if (ident == "id") return Expr::identity();
      if (ident == "inv" || ident == "trans") {
        expect('(');
        Expr inner = expr();
        expect(')');
        return ident == "inv" ? Expr::inv(inner) : Expr::trans(inner);
      }
      return Expr::operand(ident);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_offset_;
};

}  // namespace

Expr parse_expression(std::string_view text, int line, int column_offset) {
  return Reader(text, line, column_offset).parse();
}

}  // namespace lacomp
