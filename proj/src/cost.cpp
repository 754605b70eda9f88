#include "lacomp/cost.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace lacomp {

namespace {

void add_term(std::map<Monomial, Rational>& terms, const Monomial& m, const Rational& c) {
  if (c == Rational(0)) return;
  auto [it, inserted] = terms.emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second == Rational(0)) terms.erase(it);
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  for (const auto& [s, e] : b) out[s] += e;
  return out;
}

int symbol_rank(const std::string& s) {
  static const std::map<std::string, int> order = {{"m", 0}, {"t", 1}, {"p", 2}, {"n", 3}};
  auto it = order.find(s);
  return it == order.end() ? 4 : it->second;
}

bool display_symbol_less(const std::string& a, const std::string& b) {
  int ra = symbol_rank(a);
  int rb = symbol_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

int regime_rank(const Regime& regime, const std::string& s) {
  auto it = regime.find(s);
  return it == regime.end() ? 1 : it->second;
}

// Degree counts per rank threshold, highest threshold first.
std::vector<int> profile(const Monomial& m, const Regime& regime, const std::vector<int>& ranks) {
  std::vector<int> out;
  for (int r : ranks) {
    int total = 0;
    for (const auto& [s, e] : m)
      if (regime_rank(regime, s) >= r) total += e;
    out.push_back(total);
  }
  return out;
}

std::vector<int> ranks_of(const Regime& regime, const std::vector<Monomial>& ms) {
  std::set<int> rs;
  for (const auto& [s, r] : regime) rs.insert(r);
  for (const auto& m : ms)
    for (const auto& [s, e] : m) rs.insert(regime_rank(regime, s));
  return {rs.rbegin(), rs.rend()};
}

}  // namespace

CostPolynomial CostPolynomial::constant(Rational c) {
  CostPolynomial p;
  add_term(p.terms_, {}, c);
  return p;
}

CostPolynomial CostPolynomial::symbol(const std::string& s) {
  if (s == "1") return constant(1);
  CostPolynomial p;
  p.terms_[{{s, 1}}] = 1;
  return p;
}

CostPolynomial CostPolynomial::monomial(Rational c, const std::vector<std::string>& symbols) {
  Monomial m;
  for (const auto& s : symbols)
    if (s != "1") ++m[s];
  CostPolynomial p;
  add_term(p.terms_, m, c);
  return p;
}

CostPolynomial& CostPolynomial::operator+=(const CostPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(terms_, m, c);
  return *this;
}

CostPolynomial& CostPolynomial::operator-=(const CostPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(terms_, m, -c);
  return *this;
}

CostPolynomial operator*(const CostPolynomial& a, const CostPolynomial& b) {
  CostPolynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) add_term(out.terms_, multiply(ma, mb), ca * cb);
  return out;
}

CostPolynomial operator*(const Rational& c, const CostPolynomial& p) {
  return CostPolynomial::constant(c) * p;
}

CostPolynomial CostPolynomial::mul_by_extent(const std::vector<std::string>& extents) const {
  return *this * monomial(1, extents);
}

CostPolynomial CostPolynomial::substitute(const std::map<std::string, CostPolynomial>& with) const {
  CostPolynomial out;
  for (const auto& [m, c] : terms_) {
    CostPolynomial term = constant(c);
    for (const auto& [s, e] : m) {
      auto it = with.find(s);
      CostPolynomial base = it == with.end() ? symbol(s) : it->second;
      for (int k = 0; k < e; ++k) term = term * base;
    }
    out += term;
  }
  return out;
}

Rational CostPolynomial::evaluate(const std::map<std::string, std::int64_t>& values) const {
  Rational total(0);
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (const auto& [s, e] : m) {
      auto it = values.find(s);
      if (it == values.end()) throw Error("cost polynomial: symbol '" + s + "' is unbound");
      for (int k = 0; k < e; ++k) v *= it->second;
    }
    total += v;
  }
  return total;
}

double CostPolynomial::evaluate_double(const std::map<std::string, double>& values) const {
  double total = 0;
  for (const auto& [m, c] : terms_) {
    double v = boost::rational_cast<double>(c);
    for (const auto& [s, e] : m) {
      auto it = values.find(s);
      if (it == values.end()) throw Error("cost polynomial: symbol '" + s + "' is unbound");
      v *= std::pow(it->second, e);
    }
    total += v;
  }
  return total;
}

std::string monomial_str(const Monomial& m) {
  std::vector<std::pair<std::string, int>> parts(m.begin(), m.end());
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return display_symbol_less(a.first, b.first); });
  std::string out;
  for (const auto& [s, e] : parts) {
    if (!out.empty()) out += ' ';
    out += s;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

namespace {

// Display order: higher-ranked degrees first.
bool display_before(const Monomial& a, const Monomial& b, const Regime& regime) {
  std::vector<int> ranks = ranks_of(regime, {a, b});
  std::vector<int> pa, pb;
  for (int r : ranks) {
    int ta = 0, tb = 0;
    for (const auto& [s, e] : a)
      if (regime_rank(regime, s) == r) ta += e;
    for (const auto& [s, e] : b)
      if (regime_rank(regime, s) == r) tb += e;
    pa.push_back(ta);
    pb.push_back(tb);
  }
  if (pa != pb) return pa > pb;
  return monomial_str(a) < monomial_str(b);
}

}  // namespace

std::string CostPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Monomial, Rational>> ts(terms_.begin(), terms_.end());
  std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
    return display_before(a.first, b.first, default_regime());
  });
  std::string out;
  for (const auto& [m, c] : ts) {
    Rational mag = c < Rational(0) ? -c : c;
    if (out.empty()) {
      if (c < Rational(0)) out += "-";
    } else {
      out += c < Rational(0) ? " - " : " + ";
    }
    bool unit = mag == Rational(1);
    if (!unit || m.empty()) out += to_string(mag);
    if (!m.empty()) {
      if (!unit) out += ' ';
      out += monomial_str(m);
    }
  }
  return out;
}

CostPolynomial parse_cost(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  if (tokens.size() == 1 && tokens[0] == "0") return {};
  CostPolynomial out;
  std::size_t i = 0;
  auto bad = [&](const std::string& why) { return Error("malformed cost '" + std::string(text) + "': " + why); };
  while (i < tokens.size()) {
    Rational sign(1);
    if (tokens[i] == "+" || tokens[i] == "-") {
      if (out.is_zero() && i == 0) throw bad("leading operator");
      sign = tokens[i] == "-" ? Rational(-1) : Rational(1);
      ++i;
    } else if (i > 0) {
      throw bad("missing operator");
    }
    if (i >= tokens.size()) throw bad("dangling operator");
    if (tokens[i].size() > 1 && tokens[i][0] == '-' && i == 0) {
      sign = Rational(-1);
      tokens[i] = tokens[i].substr(1);
    }
    Rational coeff(1);
    if (std::isdigit(static_cast<unsigned char>(tokens[i][0]))) {
      const std::string& c = tokens[i];
      auto slash = c.find('/');
      try {
        coeff = slash == std::string::npos
                    ? Rational(std::stoll(c))
                    : Rational(std::stoll(c.substr(0, slash)), std::stoll(c.substr(slash + 1)));
      } catch (const std::exception&) {
        throw bad("coefficient " + c);
      }
      ++i;
    }
    std::vector<std::string> symbols;
    while (i < tokens.size() && tokens[i] != "+" && tokens[i] != "-") {
      const std::string& f = tokens[i++];
      auto caret = f.find('^');
      std::string sym = f.substr(0, caret);
      if (sym.empty() || !std::isalpha(static_cast<unsigned char>(sym[0]))) throw bad("factor " + f);
      int power = 1;
      if (caret != std::string::npos) {
        try {
          power = std::stoi(f.substr(caret + 1));
        } catch (const std::exception&) {
          throw bad("exponent " + f);
        }
      }
      for (int k = 0; k < power; ++k) symbols.push_back(sym);
    }
    out += CostPolynomial::monomial(sign * coeff, symbols);
  }
  return out;
}

const Regime& default_regime() {
  static const Regime r = {{"n", 3}, {"m", 2}, {"t", 2}, {"p", 1}};
  return r;
}

bool dominates(const Monomial& a, const Monomial& b, const Regime& regime) {
  std::vector<int> ranks = ranks_of(regime, {a, b});
  std::vector<int> pa = profile(a, regime, ranks);
  std::vector<int> pb = profile(b, regime, ranks);
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i] < pb[i]) return false;
  return true;
}

std::vector<Monomial> leading_terms(const CostPolynomial& c, const Regime& regime) {
  if (c.is_zero()) throw Error("leading terms of the zero polynomial");
  std::vector<Monomial> all;
  for (const auto& [m, coeff] : c.terms()) all.push_back(m);
  std::vector<Monomial> out;
  for (const auto& m : all) {
    bool beaten = false;
    for (const auto& o : all) {
      if (o == m) continue;
      if (dominates(o, m, regime) && !dominates(m, o, regime)) {
        beaten = true;
        break;
      }
    }
    if (!beaten) out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [&](const Monomial& a, const Monomial& b) { return display_before(a, b, regime); });
  return out;
}

std::string big_o(const CostPolynomial& c, const Regime& regime) {
  std::string out = "O(";
  bool first = true;
  for (const auto& m : leading_terms(c, regime)) {
    if (!first) out += " + ";
    out += monomial_str(m);
    first = false;
  }
  return out + ")";
}

std::string_view asymptotic_name(Asymptotic a) {
  switch (a) {
    case Asymptotic::Less: return "less";
    case Asymptotic::Greater: return "greater";
    case Asymptotic::Equal: return "equal";
    case Asymptotic::Incomparable: return "incomparable";
  }
  return "?";
}

Asymptotic compare_asymptotic(const CostPolynomial& c1, const CostPolynomial& c2,
                              const Regime& regime) {
  auto bounded = [&](const std::vector<Monomial>& xs, const std::vector<Monomial>& ys) {
    return std::all_of(xs.begin(), xs.end(), [&](const Monomial& x) {
      return std::any_of(ys.begin(), ys.end(),
                         [&](const Monomial& y) { return dominates(y, x, regime); });
    });
  };
  auto l1 = leading_terms(c1, regime);
  auto l2 = leading_terms(c2, regime);
  bool le = bounded(l1, l2);
  bool ge = bounded(l2, l1);
  if (le && ge) return Asymptotic::Equal;
  if (le) return Asymptotic::Less;
  if (ge) return Asymptotic::Greater;
  return Asymptotic::Incomparable;
}

}  // namespace lacomp
