#include "lacomp/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lacomp/rewrite.hpp"

namespace lacomp {

namespace {

#include "default_catalog.inc"

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw KernelError("catalog line " + std::to_string(line) + ": " + msg);
}

Rational parse_rational(const std::string& tok, const std::map<std::string, Rational>& params,
                        int line) {
  if (auto it = params.find(tok); it != params.end()) return it->second;
  try {
    std::size_t slash = tok.find('/');
    std::size_t used = 0;
    std::int64_t num = std::stoll(tok.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? tok.size() : slash)) throw std::invalid_argument(tok);
    if (slash == std::string::npos) return Rational(num);
    std::string den_s = tok.substr(slash + 1);
    std::int64_t den = std::stoll(den_s, &used);
    if (used != den_s.size() || den == 0) throw std::invalid_argument(tok);
    return Rational(num, den);
  } catch (const std::logic_error&) {
    fail(line, "expected a rational or parameter name, got '" + tok + "'");
  }
}


CostTerm parse_cost(const std::vector<std::string>& w, const std::map<std::string, Rational>& params,
                    int line) {
  if (w.size() < 2) fail(line, "cost needs a coefficient");
  CostTerm t;
  t.coeff = parse_rational(w[1], params, line);
  for (std::size_t i = 2; i < w.size(); ++i) {
    const std::string& x = w[i];
    bool rows = x.rfind("rows(", 0) == 0;
    bool cols = x.rfind("cols(", 0) == 0;
    if ((!rows && !cols) || x.back() != ')') fail(line, "expected rows(H) or cols(H), got '" + x + "'");
    t.extents.emplace_back(x.substr(5, x.size() - 6), rows);
  }
  return t;
}

Property parse_property(const std::string& s, int line) {
  auto p = property_from_name(s);
  if (!p) fail(line, "unknown property '" + s + "'");
  return *p;
}

void check_holes(const KernelPattern& k, int line) {
  std::vector<std::string> used = k.pattern.operands();
  for (const auto& n : used)
    if (!k.hole(n)) fail(line, "pattern of " + k.label() + " uses undeclared hole '" + n + "'");
  for (const auto& h : k.holes)
    if (std::find(used.begin(), used.end(), h.name) == used.end())
      fail(line, "hole '" + h.name + "' does not occur in " + k.label());
  for (const auto& t : k.cost)
    for (const auto& [hole, rows] : t.extents)
      if (!k.hole(hole)) fail(line, "cost of " + k.label() + " uses undeclared hole '" + hole + "'");
}

// ---------------------------------------------------------------------------
// Matching

struct Matcher {
  const KernelPattern& k;
  const PropertyContext& ctx;

  bool is_atom(const Expr& s) const {
    return s.is(NodeKind::Operand) ||
           (s.is(NodeKind::Transpose) && s.child().is(NodeKind::Operand));
  }

  bool bind(const std::string& hole, const Expr& s, Bindings& b) const {
    const HoleSpec* h = k.hole(hole);
    if (h->kind == HoleKind::Scalar) {
      if (!is_scalar_valued(s, ctx)) return false;
    } else if (!is_atom(s)) {
      return false;
    }
    auto [it, inserted] = b.emplace(hole, s);
    return inserted || it->second == s;
  }

  bool leading_scalar_hole(const Expr& p) const {
    return p.is(NodeKind::Operand) && k.hole(p.name())->kind == HoleKind::Scalar;
  }

  bool node(const Expr& p, const Expr& s, Bindings& b, bool nested) const {
    switch (p.kind()) {
      case NodeKind::Operand:
        return bind(p.name(), s, b);
      case NodeKind::Scalar:
        return s.is(NodeKind::Scalar) && s.value() == p.value();
      case NodeKind::Identity:
        return s.is(NodeKind::Identity);
      case NodeKind::Transpose:
        if (is_scalar_valued(s, ctx) && !p.child().is(NodeKind::Operand)) return false;
        return node(p.child(), light_transpose(s, ctx), b, true);
      case NodeKind::Inverse:
        return s.is(NodeKind::Inverse) && node(p.child(), s.child(), b, true);
      case NodeKind::Negate:
        return false;
      case NodeKind::Times:
        return times(p, s, b, nested);
      case NodeKind::Plus:
        return plus(p, s, b);
    }
    return false;
  }

  bool times(const Expr& p, const Expr& s, Bindings& b, bool nested) const {
    auto pf = p.children();
    std::vector<Expr> sf;
    if (s.is(NodeKind::Times)) {
      sf.assign(s.children().begin(), s.children().end());
    } else {
      sf.push_back(s);
    }
    std::size_t pi = 0;
    std::size_t si = 0;
    if (leading_scalar_hole(pf[0])) {
      std::vector<Expr> prefix;
      while (si < sf.size() && is_scalar_valued(sf[si], ctx)) prefix.push_back(sf[si++]);
      Expr coeff;
      if (prefix.empty()) {
        if (!nested) return false;
        coeff = Expr::scalar(1);
      } else {
        coeff = prefix.size() == 1 ? prefix[0] : canonicalize(Expr::times(prefix), ctx);
      }
      if (!bind(pf[0].name(), coeff, b)) return false;
      pi = 1;
    }
    if (pf.size() - pi != sf.size() - si) return false;
    for (; pi < pf.size(); ++pi, ++si)
      if (!node(pf[pi], sf[si], b, true)) return false;
    return true;
  }

  bool plus(const Expr& p, const Expr& s, Bindings& b) const {
    if (!s.is(NodeKind::Plus) || s.children().size() != p.children().size()) return false;
    std::vector<std::size_t> order(p.children().size());
    std::iota(order.begin(), order.end(), 0);
    do {
      Bindings trial = b;
      bool ok = true;
      for (std::size_t i = 0; i < order.size() && ok; ++i)
        ok = node(p.children()[i], s.children()[order[i]], trial, true);
      if (ok) {
        b = std::move(trial);
        return true;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    return false;
  }

  bool guards(const Bindings& b) const {
    for (const auto& h : k.holes) {
      auto it = b.find(h.name);
      if (it == b.end()) return false;
      if (h.guards.empty()) continue;
      Verdicts v = infer(it->second, ctx);
      for (const auto& g : h.guards) {
        bool any = std::any_of(g.any_of.begin(), g.any_of.end(),
                               [&](Property q) { return v[q] == Verdict::Holds; });
        if (any == g.negated) return false;
      }
    }
    return true;
  }

  Expr instantiate(const Expr& e, const Bindings& b) const {
    Expr x = e.map([&](const Expr& n) {
      if (n.is(NodeKind::Operand)) {
        auto it = b.find(n.name());
        if (it != b.end()) return it->second;
      }
      return n;
    });
    return light_transpose(light_transpose(x, ctx), ctx);
  }

  bool constraints(const Bindings& b) const {
    for (const auto& c : k.constraints) {
      bool same = instantiate(c.lhs, b) == instantiate(c.rhs, b);
      if (same != c.equal) return false;
    }
    return true;
  }
};

}  // namespace

const HoleSpec* KernelPattern::hole(const std::string& n) const {
  for (const auto& h : holes)
    if (h.name == n) return &h;
  return nullptr;
}

std::vector<std::string> KernelCall::reads() const {
  std::vector<std::string> out;
  for (const auto& [hole, e] : inputs) e.collect_operands(out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string_view Catalog::default_text() { return kDefaultCatalog; }

const Catalog& Catalog::defaults() {
  static const Catalog c = parse(kDefaultCatalog);
  return c;
}

Catalog Catalog::parse(std::string_view text) {
  Catalog cat;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  KernelPattern* kernel = nullptr;
  FactorizationEntry* fact = nullptr;
  auto finish = [&] {
    if (kernel) check_holes(*kernel, line);
    kernel = nullptr;
    fact = nullptr;
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    std::vector<std::string> w = split_ws(s);
    const std::string& head = w[0];
    if (head == "param") {
      finish();
      if (w.size() != 3) fail(line, "param expects a name and a value");
      cat.params_[w[1]] = parse_rational(w[2], {}, line);
    } else if (head == "factorization") {
      finish();
      if (w.size() != 3) fail(line, "factorization expects a name and a kind");
      auto kind = factorization_from_name(w[2]);
      if (!kind) fail(line, "unknown factorization kind '" + w[2] + "'");
      cat.factorizations_.push_back({w[1], *kind, {}});
      fact = &cat.factorizations_.back();
    } else if (head == "kernel") {
      finish();
      std::size_t colon = s.find(':');
      if (colon == std::string::npos) fail(line, "kernel expects '<name>: <pattern>'");
      std::string id = trim(std::string_view(s).substr(6, colon - 6));
      KernelPattern k;
      std::size_t lb = id.find('[');
      if (lb != std::string::npos) {
        if (id.back() != ']') fail(line, "unterminated variant in '" + id + "'");
        k.name = id.substr(0, lb);
        k.variant = id.substr(lb + 1, id.size() - lb - 2);
      } else {
        k.name = id;
      }
      if (k.name.empty()) fail(line, "kernel without a name");
      k.pattern = parse_expression(s.substr(colon + 1), line, static_cast<int>(colon + 1));
      cat.kernels_.push_back(std::move(k));
      kernel = &cat.kernels_.back();
    } else if (head == "hole") {
      if (!kernel) fail(line, "hole outside a kernel entry");
      if (w.size() < 3) fail(line, "hole expects a name and a kind");
      HoleSpec h;
      h.name = w[1];
      if (w[2] == "scalar") {
        h.kind = HoleKind::Scalar;
      } else if (w[2] == "atom") {
        h.kind = HoleKind::Atom;
      } else {
        fail(line, "hole kind must be scalar or atom, got '" + w[2] + "'");
      }
      for (std::size_t i = 3; i < w.size(); ++i) {
        GuardClause g;
        std::string body = w[i];
        if (body[0] == '!') {
          g.negated = true;
          body = body.substr(1);
        }
        std::size_t start = 0;
        for (;;) {
          std::size_t bar = body.find('|', start);
          g.any_of.push_back(parse_property(body.substr(start, bar - start), line));
          if (bar == std::string::npos) break;
          start = bar + 1;
        }
        h.guards.push_back(std::move(g));
      }
      if (kernel->hole(h.name)) fail(line, "duplicate hole '" + h.name + "'");
      kernel->holes.push_back(std::move(h));
    } else if (head == "require") {
      if (!kernel) fail(line, "require outside a kernel entry");
      std::string rest = s.substr(7);
      bool equal = false;
      std::size_t op = rest.find("!=");
      if (op == std::string::npos) {
        op = rest.find("==");
        equal = true;
      }
      if (op == std::string::npos) fail(line, "require expects '!=' or '=='");
      kernel->constraints.push_back(
          {parse_expression(rest.substr(0, op), line), parse_expression(rest.substr(op + 2), line),
           equal});
    } else if (head == "cost") {
      CostTerm t = parse_cost(w, cat.params_, line);
      if (kernel) {
        kernel->cost.push_back(std::move(t));
      } else if (fact) {
        for (const auto& [hole, rows] : t.extents)
          if (hole != "A") fail(line, "factorization cost may only refer to hole A");
        fact->cost.push_back(std::move(t));
      } else {
        fail(line, "cost outside an entry");
      }
    } else {
      fail(line, "unknown keyword '" + head + "'");
    }
  }
  finish();
  return cat;
}

const FactorizationEntry& Catalog::factorization(Factorization kind) const {
  for (const auto& f : factorizations_)
    if (f.kind == kind) return f;
  throw KernelError("catalog has no entry for factorization " +
                    std::string(factorization_name(kind)));
}

std::optional<Bindings> match_pattern(const KernelPattern& pattern, const Expr& e,
                                      const PropertyContext& ctx) {
  Matcher m{pattern, ctx};
  Bindings b;
  if (!m.node(pattern.pattern, e, b, false)) return std::nullopt;
  if (!m.guards(b) || !m.constraints(b)) return std::nullopt;
  return b;
}

std::vector<KernelMatch> Catalog::match(const Expr& e, const PropertyContext& ctx) const {
  std::vector<KernelMatch> out;
  Expr et = transpose_of(e, ctx);
  bool self_transposed = et == e;
  for (const auto& k : kernels_) {
    if (auto b = match_pattern(k, e, ctx)) out.push_back({&k, *b, e, false});
    if (self_transposed) continue;
    if (auto b = match_pattern(k, et, ctx)) out.push_back({&k, *b, et, true});
  }
  return out;
}

std::optional<KernelMatch> Catalog::best_match(const Expr& e, const PropertyContext& ctx) const {
  Expr et = transpose_of(e, ctx);
  for (const auto& k : kernels_) {
    if (auto b = match_pattern(k, e, ctx)) return KernelMatch{&k, *b, e, false};
    if (et == e) continue;
    if (auto b = match_pattern(k, et, ctx)) return KernelMatch{&k, *b, et, true};
  }
  return std::nullopt;
}

namespace {

CostPolynomial evaluate_terms(const std::vector<CostTerm>& terms,
                              const std::function<Shape(const std::string&)>& shape_of) {
  CostPolynomial total;
  for (const auto& t : terms) {
    std::vector<std::string> syms;
    for (const auto& [hole, rows] : t.extents) {
      Shape s = shape_of(hole);
      const std::string& sym = rows ? s.rows : s.cols;
      if (sym.empty()) throw KernelError("cost refers to the unbounded extent of the identity");
      syms.push_back(sym);
    }
    total += CostPolynomial::monomial(t.coeff, syms);
  }
  return total;
}

}  // namespace

CostPolynomial Catalog::cost_of(const KernelMatch& m, const PropertyContext& ctx) const {
  return evaluate_terms(m.pattern->cost, [&](const std::string& hole) {
    auto it = m.bindings.find(hole);
    if (it == m.bindings.end()) throw KernelError("cost of " + m.pattern->label() + ": hole '" + hole + "' is unbound");
    return dims(it->second, ctx);
  });
}

CostPolynomial Catalog::factorization_cost(Factorization kind, const Shape& shape) const {
  return evaluate_terms(factorization(kind).cost, [&](const std::string&) { return shape; });
}

std::vector<Factorization> viable_factorizations(const std::string& operand,
                                                 const PropertyContext& ctx) {
  using P = Property;
  using F = Factorization;
  const OperandInfo& info = ctx.operand(operand);
  const PropertySet& p = info.properties;
  const Shape& s = info.shape;
  if (s.is_scalar() || s.rows == "1" || s.cols == "1") return {};
  for (P q : {P::Diagonal, P::LowerTriangular, P::UpperTriangular, P::OrthonormalColumns})
    if (has(p, q)) return {};
  if (has(p, P::SPD)) return {F::Cholesky, F::QR, F::Eig, F::SVD};
  if (has(p, P::Symmetric)) return {F::Eig, F::SVD};
  bool tall = s.rows == s.cols || ctx.known_greater(s.rows, s.cols);
  if (has(p, P::FullRank) && tall) return {F::QR, F::SVD};
  if (tall || ctx.known_greater(s.cols, s.rows)) return {F::SVD};
  return {};
}

}  // namespace lacomp
