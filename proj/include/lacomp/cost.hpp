#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lacomp/expr.hpp"

namespace lacomp {

/// Exponents per size symbol; symbols with exponent 0 are not stored.
using Monomial = std::map<std::string, int>;

/// Exact polynomial in the size symbols with rational coefficients.
class CostPolynomial {
 public:
  CostPolynomial() = default;
  static CostPolynomial constant(Rational c);
  /// The symbol "1" denotes the constant 1.
  static CostPolynomial symbol(const std::string& s);
  static CostPolynomial monomial(Rational c, const std::vector<std::string>& symbols);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  CostPolynomial& operator+=(const CostPolynomial& o);
  CostPolynomial& operator-=(const CostPolynomial& o);
  friend CostPolynomial operator+(CostPolynomial a, const CostPolynomial& b) { return a += b; }
  friend CostPolynomial operator-(CostPolynomial a, const CostPolynomial& b) { return a -= b; }
  friend CostPolynomial operator*(const CostPolynomial& a, const CostPolynomial& b);
  friend CostPolynomial operator*(const Rational& c, const CostPolynomial& p);
  friend bool operator==(const CostPolynomial&, const CostPolynomial&) = default;

  /// Multiplies by the product of the given extents.
  CostPolynomial mul_by_extent(const std::vector<std::string>& extents) const;

  /// Replaces each symbol by a polynomial (missing symbols are kept).
  CostPolynomial substitute(const std::map<std::string, CostPolynomial>& with) const;

  /// Exact evaluation; throws Error for an unbound symbol.
  Rational evaluate(const std::map<std::string, std::int64_t>& values) const;
  double evaluate_double(const std::map<std::string, double>& values) const;

  /// e.g. "1/3 n^3 + 2 m p n^2"; "0" for the zero polynomial.
  std::string str() const;

 private:
  std::map<Monomial, Rational> terms_;
};

/// Reads the str() form back.
CostPolynomial parse_cost(std::string_view text);

/// Growth class per symbol; a larger rank grows faster.
using Regime = std::map<std::string, int>;

/// n dominant, then m and t, then p.
const Regime& default_regime();

/// a >= b in the majorization order induced by the regime: for every rank
/// threshold r, a has at least as many factors of rank >= r as b.
bool dominates(const Monomial& a, const Monomial& b, const Regime& regime);

/// Monomials not strictly dominated by another monomial of `c`, ordered
/// for display. Throws Error on the zero polynomial.
std::vector<Monomial> leading_terms(const CostPolynomial& c, const Regime& regime = default_regime());

/// "m p n^2"; symbols ordered m, t, p, n, then others alphabetically.
std::string monomial_str(const Monomial& m);

/// "O(n^3 + m p n^2)".
std::string big_o(const CostPolynomial& c, const Regime& regime = default_regime());

enum class Asymptotic { Less, Greater, Equal, Incomparable };

std::string_view asymptotic_name(Asymptotic a);

/// Compares leading-term sets: Less when every leading term of c1 is
/// bounded by one of c2 and not conversely.
Asymptotic compare_asymptotic(const CostPolynomial& c1, const CostPolynomial& c2,
                              const Regime& regime = default_regime());

}  // namespace lacomp
