#pragma once

#include <random>
#include <string>
#include <vector>

#include "lacomp/properties.hpp"
#include "lacomp/refexec.hpp"
#include "lacomp/rewrite.hpp"

namespace lacomp::testing {

using P = Property;

// Random expressions over a fresh context with sizes n > p. Operands are
// declared on demand with random property sets; inverses are only taken of
// subexpressions that are invertible by construction.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {
    ctx_.declare_size("n");
    ctx_.declare_size("p");
    ctx_.assume_greater("n", "p");
  }

  const PropertyContext& ctx() const { return ctx_; }

  Expr any(const std::string& r, const std::string& c, int depth) {
    if (depth <= 0) return leaf(r, c);
    bool square = r == c && r != "1";
    int roll = pick(100);
    if (roll < 35) {
      std::string k = pick(10) == 0 ? "1" : (pick(2) ? "n" : "p");
      if (r == "1" && c == "1" && k == "1") k = "n";
      return Expr::times({any(r, k, depth - 1), any(k, c, depth - 1)});
    }
    if (roll < 55) {
      Expr a = any(r, c, depth - 1);
      Expr b = square && pick(3) == 0 ? Expr::identity() : any(r, c, depth - 1);
      if (pick(2)) b = Expr::times({scalar(depth - 1), b});
      if (pick(4) == 0) return Expr::plus({a, Expr::negate(b)});
      return Expr::plus({a, b});
    }
    if (roll < 65) return Expr::trans(any(c, r, depth - 1));
    if (roll < 75 && (square || (r == "1" && c == "1"))) return Expr::inv(invertible(r, depth - 1));
    if (roll < 85) return Expr::times({scalar(depth - 1), any(r, c, depth - 1)});
    return leaf(r, c);
  }

  Expr invertible(const std::string& r, int depth) {
    if (r == "1") return pick(2) ? literal() : operand("1", "1", true);
    int roll = depth <= 0 ? pick(40) : pick(100);
    if (roll < 40) return operand(r, r, true);
    if (roll < 60) return Expr::times({invertible(r, depth - 1), invertible(r, depth - 1)});
    if (roll < 70) return Expr::trans(invertible(r, depth - 1));
    if (roll < 78) return Expr::inv(invertible(r, depth - 1));
    if (roll < 84) return Expr::times({literal(), invertible(r, depth - 1)});
    if (roll < 94) {
      Expr s = operand(r, r, true, props({P::SPD}));
      return Expr::plus({Expr::times({positive(), s}), Expr::times({positive(), Expr::identity()})});
    }
    // Gram and congruence forms of a tall full-rank operand.
    if (r == "p") {
      Expr x = operand("n", "p", false, props({P::FullRank}));
      if (pick(2)) return Expr::times({Expr::trans(x), x});
      return Expr::times({Expr::trans(x), operand("n", "n", true, props({P::SPD})), x});
    }
    return operand(r, r, true);
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Expr literal() {
    static const Rational values[] = {Rational(2), Rational(-1), Rational(1, 2), Rational(3, 4), Rational(-3),
                                      Rational(5, 3)};
    return Expr::scalar(values[pick(6)]);
  }

  Expr positive() {
    static const Rational values[] = {Rational(1), Rational(2), Rational(1, 2), Rational(3, 4)};
    return Expr::scalar(values[pick(4)]);
  }

  Expr scalar(int depth) {
    int roll = pick(10);
    if (roll < 4) return literal();
    if (roll < 7) return operand("1", "1", false);
    if (roll < 9) {
      Expr h = operand("1", "1", false);
      return Expr::plus({Expr::scalar(1), Expr::negate(h)});
    }
    if (depth > 0) return Expr::times({Expr::trans(any("n", "1", 0)), any("n", "1", 0)});
    return literal();
  }

  Expr leaf(const std::string& r, const std::string& c) {
    if (r == "1" && c == "1") return pick(2) ? literal() : operand("1", "1", false);
    if (r == c && pick(8) == 0) return Expr::identity();
    if (r == "1") return Expr::trans(operand(c, "1", false));
    if (r == "p" && c == "n" && pick(2)) return Expr::trans(operand("n", "p", false));
    return operand(r, c, false);
  }

  // A new or reused operand of this shape; `invertible` restricts the choice
  // to full-rank square operands; `want` forces a property set.
  Expr operand(const std::string& r, const std::string& c, bool invertible, PropertySet want = {}) {
    Shape shape{r, c};
    if (pick(5) < 2) {
      std::vector<std::string> fits;
      for (const auto& [name, info] : ctx_.operands()) {
        if (!(info.shape == shape)) continue;
        if (invertible && !has(info.properties, P::FullRank) && !(r == "1")) continue;
        if (want.any() && (info.properties & want) != want) continue;
        fits.push_back(name);
      }
      if (!fits.empty()) return Expr::operand(fits[pick(static_cast<int>(fits.size()))]);
    }
    PropertySet ps = want.any() ? want : random_properties(r, c, invertible);
    std::string name = (r == "1" && c == "1" ? "h" : c == "1" ? "v" : "A") + std::to_string(next_++);
    ctx_.declare_operand(name, ps, shape);
    return Expr::operand(name);
  }

  PropertySet random_properties(const std::string& r, const std::string& c, bool invertible) {
    if (r == "1" || c == "1") return {};
    if (r != c) {
      if (r == "n") {
        static const PropertySet tall[] = {{}, props({P::FullRank}), props({P::OrthonormalColumns})};
        return tall[pick(3)];
      }
      return pick(2) ? props({P::FullRank}) : PropertySet{};
    }
    static const PropertySet regular[] = {props({P::FullRank}),
                                          props({P::SPD}),
                                          props({P::Diagonal, P::FullRank}),
                                          props({P::LowerTriangular, P::FullRank}),
                                          props({P::UpperTriangular, P::FullRank}),
                                          props({P::OrthogonalSquare})};
    static const PropertySet loose[] = {{}, props({P::Symmetric}), props({P::Diagonal}),
                                        props({P::LowerTriangular}), props({P::UpperTriangular})};
    if (invertible || pick(2)) return regular[pick(6)];
    return loose[pick(5)];
  }

  std::mt19937_64 rng_;
  PropertyContext ctx_;
  int next_ = 0;
};

// The most general matrix with exactly the declared properties: signed
// spectra, indefinite symmetric matrices and, without FullRank, occasional
// rank deficiency. Full-rank factors keep singular values in [0.5, 2].
inline DenseMatrix conforming(const PropertySet& declared, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  PropertySet p = implication_closure(declared);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(1.0 / 3.0);
  auto signed_mag = [&] { return coin(rng) ? mag(rng) : -mag(rng); };
  auto gaussian = [&](std::size_t a, std::size_t b) {
    DenseMatrix m(a, b);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b; ++j) m(i, j) = normal(rng);
    return m;
  };
  auto orthonormal = [&](std::size_t a, std::size_t b) { return dense::householder_qr(gaussian(a, b)).q; };
  auto spectral = [&](std::size_t n, bool positive, bool deficient) {
    DenseMatrix q = orthonormal(n, n);
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = positive ? mag(rng) : signed_mag();
    if (deficient) d(0, 0) = 0;
    return q * d * q.transpose();
  };
  bool full = has(p, P::FullRank);

  if (r == 1 && c == 1 && !has(p, P::Matrix) && !has(p, P::Vector)) return DenseMatrix(1, 1, signed_mag());
  if (has(p, P::Identity)) return DenseMatrix::identity(r);
  if (has(p, P::OrthonormalColumns)) return orthonormal(r, c);
  if (has(p, P::Diagonal)) {
    DenseMatrix d(r, c);
    for (std::size_t i = 0; i < std::min(r, c); ++i) d(i, i) = signed_mag();
    if (!full && rare(rng)) d(0, 0) = 0;
    return d;
  }
  if (has(p, P::SPD)) return spectral(r, true, false);
  if (has(p, P::Symmetric)) return spectral(r, false, !full && rare(rng));
  bool lower = has(p, P::LowerTriangular);
  bool upper = has(p, P::UpperTriangular);
  if (lower || upper) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        if (i == j) {
          m(i, j) = coin(rng) ? 1.0 + mag(rng) / 2 : -1.0 - mag(rng) / 2;
        } else if ((lower && j < i) || (upper && j > i)) {
          m(i, j) = 0.5 * normal(rng);
        }
      }
    if (!full && rare(rng)) m(r - 1, c - 1) = 0;
    return m;
  }
  if (full) {
    std::size_t k = std::min(r, c);
    DenseMatrix s(k, k);
    for (std::size_t i = 0; i < k; ++i) s(i, i) = mag(rng);
    return orthonormal(r, k) * s * orthonormal(c, k).transpose();
  }
  std::size_t k = std::min(r, c);
  if (k > 1 && r > 1 && c > 1 && rare(rng)) return gaussian(r, k - 1) * gaussian(k - 1, c);
  return gaussian(r, c);
}

// One conforming value for every operand of the context.
inline std::map<std::string, DenseMatrix> instantiate(const PropertyContext& ctx,
                                                      const std::map<std::string, std::int64_t>& sizes,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<std::string, DenseMatrix> out;
  for (const auto& [name, info] : ctx.operands())
    out[name] = conforming(info.properties, numeric_size(info.shape.rows, sizes), numeric_size(info.shape.cols, sizes),
                           rng);
  return out;
}

}  // namespace lacomp::testing
