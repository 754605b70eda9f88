#include "lacomp/problem.hpp"

#include <fstream>
#include <sstream>

namespace lacomp {

namespace {

struct Line {
  int number;
  std::string text;

  [[noreturn]] void fail(const std::string& msg, std::size_t col = 0) const {
    throw ParseError(msg, number, static_cast<int>(col) + 1);
  }
};

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return s != "id" && s != "inv" && s != "trans";
}

PropertySet parse_properties(const std::vector<std::string>& ws, std::size_t from, const Line& line) {
  PropertySet s;
  for (std::size_t i = from; i < ws.size(); ++i) {
    auto p = property_from_name(ws[i]);
    if (!p) line.fail("unknown property '" + ws[i] + "'", line.text.find(ws[i]));
    add(s, *p);
  }
  return s;
}

// rows(X), cols(X) or a size symbol.
std::string size_term(const std::string& w, const PropertyContext& ctx, const Line& line) {
  for (const char* f : {"rows(", "cols("}) {
    if (w.rfind(f, 0) == 0 && w.back() == ')') {
      std::string op = w.substr(5, w.size() - 6);
      if (!ctx.has_operand(op)) line.fail("undeclared operand '" + op + "'", line.text.find(w));
      const Shape& s = ctx.operand(op).shape;
      return f[0] == 'r' ? s.rows : s.cols;
    }
  }
  if (!ctx.is_size(w)) line.fail("undeclared size '" + w + "'", line.text.find(w));
  return w;
}

void check_shape_properties(const std::string& name, const PropertySet& ps, const Shape& s,
                            const Line& line) {
  using P = Property;
  bool scalar = s.is_scalar();
  bool vector = !scalar && (s.rows == "1" || s.cols == "1");
  if (has(ps, P::Scalar) && !scalar) line.fail("'" + name + "' is declared Scalar but is " + to_string(s));
  if (has(ps, P::Vector) && !vector) line.fail("'" + name + "' is declared Vector but is " + to_string(s));
  if (has(ps, P::Matrix) && (scalar || vector))
    line.fail("'" + name + "' is declared Matrix but is " + to_string(s));
  for (P p : {P::Symmetric, P::SPD, P::Diagonal, P::LowerTriangular, P::UpperTriangular,
              P::OrthogonalSquare, P::Identity, P::Square})
    if (has(ps, p) && s.rows != s.cols)
      line.fail("'" + name + "' is declared " + std::string(property_name(p)) + " but is " +
                to_string(s));
}

}  // namespace

Problem parse_problem(std::string_view text) {
  Problem prob;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  bool have_equation = false;
  std::vector<std::pair<Line, std::string>> assertions;  // checked after all operands
  std::vector<std::pair<Line, std::string>> equations;
  while (std::getline(in, raw)) {
    ++number;
    Line line{number, raw};
    std::string body = raw.substr(0, raw.find('#'));
    std::vector<std::string> w = words(body);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    std::size_t rest_col = body.find(kw) + kw.size();
    std::string rest = body.substr(rest_col);
    try {
      if (kw == "size") {
        if (w.size() < 2) line.fail("size expects at least one symbol");
        for (std::size_t i = 1; i < w.size(); ++i) {
          if (!is_identifier(w[i])) line.fail("bad size symbol '" + w[i] + "'", body.find(w[i], rest_col));
          prob.ctx.declare_size(w[i]);
        }
      } else if (kw == "operand") {
        // operand NAME ROWS x COLS : Props...
        std::size_t colon = body.find(':');
        std::vector<std::string> head = words(body.substr(0, colon == std::string::npos ? body.size() : colon));
        if (head.size() != 5 || head[3] != "x")
          line.fail("expected 'operand <name> <rows> x <cols> : <properties>'");
        const std::string& name = head[1];
        if (!is_identifier(name)) line.fail("bad operand name '" + name + "'", body.find(name));
        if (prob.ctx.has_operand(name)) line.fail("operand '" + name + "' declared twice", body.find(name));
        for (const auto& d : {head[2], head[4]})
          if (!prob.ctx.is_size(d)) line.fail("undeclared size '" + d + "'", body.find(d, rest_col));
        PropertySet ps;
        if (colon != std::string::npos) ps = parse_properties(words(body.substr(colon + 1)), 0, line);
        Shape shape{head[2], head[4]};
        check_shape_properties(name, ps, shape, line);
        prob.ctx.declare_operand(name, ps, shape);
      } else if (kw == "equation") {
        if (have_equation) line.fail("second equation");
        have_equation = true;
        equations.emplace_back(line, rest);
      } else if (kw == "assert") {
        assertions.emplace_back(line, rest);
      } else if (kw == "assume") {
        if (w.size() != 4 || w[2] != ">") line.fail("expected 'assume <size> > <size>'");
        prob.ctx.assume_greater(size_term(w[1], prob.ctx, line), size_term(w[3], prob.ctx, line));
      } else if (kw == "index") {
        if (w.size() != 3) line.fail("expected 'index <name> <extent>'");
        if (!is_identifier(w[1]) || !is_identifier(w[2])) line.fail("bad index declaration");
        for (const auto& [i, e] : prob.sequence.indices)
          if (i == w[1]) line.fail("index '" + w[1] + "' declared twice");
        prob.sequence.indices.emplace_back(w[1], w[2]);
      } else if (kw == "varies") {
        if (w.size() < 3) line.fail("expected 'varies <operand> <index>...'");
        if (!prob.ctx.has_operand(w[1])) line.fail("undeclared operand '" + w[1] + "'", body.find(w[1], rest_col));
        for (std::size_t i = 2; i < w.size(); ++i) {
          prob.sequence.extent(w[i]);
          prob.sequence.varies[w[1]].insert(w[i]);
        }
      } else if (kw == "validate") {
        for (std::size_t i = 1; i < w.size(); ++i) {
          std::size_t eq = w[i].find('=');
          if (eq == std::string::npos) line.fail("expected <symbol>=<value>", body.find(w[i]));
          try {
            std::int64_t v = std::stoll(w[i].substr(eq + 1));
            if (v < 1) throw std::out_of_range(w[i]);
            prob.sizes[w[i].substr(0, eq)] = v;
          } catch (const std::logic_error&) {
            line.fail("bad size value in '" + w[i] + "'", body.find(w[i]));
          }
        }
      } else {
        line.fail("unknown keyword '" + kw + "'", body.find(kw));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      line.fail(e.what());
    }
  }

  if (!have_equation) throw ParseError("no equation", number, 1);
  for (const auto& [line, text] : equations) {
    std::size_t eq = text.find('=');
    if (eq == std::string::npos) line.fail("expected '<output> = <expression>'");
    std::string out = words(text.substr(0, eq)).empty() ? "" : words(text.substr(0, eq))[0];
    try {
      int col = static_cast<int>(line.text.find(text) + eq + 1);
      prob.equation = {out, parse_expression(text.substr(eq + 1), line.number, col)};
      validate_equation(prob.equation, prob.ctx);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      line.fail(e.what());
    }
  }
  for (const auto& [line, text] : assertions) {
    std::size_t colon = text.rfind(':');
    if (colon == std::string::npos) line.fail("expected 'assert <expression> : <properties>'");
    try {
      int col = static_cast<int>(line.text.find(text));
      Expr e = parse_expression(text.substr(0, colon), line.number, col);
      PropertySet ps = parse_properties(words(text.substr(colon + 1)), 0, line);
      assert_expression(prob.ctx, e, ps);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      line.fail(e.what());
    }
  }
  return prob;
}

Problem load_problem(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read '" + path + "'", 0, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_problem(ss.str());
}

std::string to_text(const Problem& p) {
  std::ostringstream out;
  out << "size";
  for (const auto& s : p.ctx.size_symbols()) out << ' ' << s;
  out << '\n';
  for (const auto& [name, info] : p.ctx.operands()) {
    out << "operand " << name << ' ' << info.shape.rows << " x " << info.shape.cols << " :";
    for (std::size_t i = 0; i < kPropertyCount; ++i)
      if (info.properties.test(i)) out << ' ' << property_name(static_cast<Property>(i));
    out << '\n';
  }
  out << "equation " << p.equation.str() << '\n';
  for (const auto& [e, ps] : p.ctx.assertions()) {
    out << "assert " << e.str() << " :";
    for (std::size_t i = 0; i < kPropertyCount; ++i)
      if (ps.test(i)) out << ' ' << property_name(static_cast<Property>(i));
    out << '\n';
  }
  for (const auto& [a, b] : p.ctx.size_relations()) out << "assume " << a << " > " << b << '\n';
  for (const auto& [i, e] : p.sequence.indices) out << "index " << i << ' ' << e << '\n';
  for (const auto& [op, idx] : p.sequence.varies) {
    if (idx.empty()) continue;
    out << "varies " << op;
    for (const auto& i : idx) out << ' ' << i;
    out << '\n';
  }
  if (!p.sizes.empty()) {
    out << "validate";
    for (const auto& [k, v] : p.sizes) out << ' ' << k << '=' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace lacomp
