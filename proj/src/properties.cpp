#include "lacomp/properties.hpp"

#include "lacomp/rewrite.hpp"

namespace lacomp {

using P = Property;

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

bool known_tall_or_square(const Shape& s, const PropertyContext& ctx) {
  return s.rows == s.cols || s.cols == "1" || ctx.known_greater(s.rows, s.cols);
}

namespace {

// Properties read off the shape alone.
Verdicts shape_verdicts(const Shape& s, const PropertyContext& ctx) {
  Verdicts v;
  if (s.is_polymorphic()) {
    add(v.holds, P::Square);
    add(v.holds, P::Matrix);
    return v;
  }
  if (s.is_scalar()) {
    add(v.holds, P::Scalar);
    add(v.fails, P::Vector);
    add(v.fails, P::Matrix);
  } else if (s.rows == "1" || s.cols == "1") {
    add(v.holds, P::Vector);
    add(v.fails, P::Scalar);
    add(v.fails, P::Matrix);
  } else {
    add(v.holds, P::Matrix);
    add(v.fails, P::Scalar);
    add(v.fails, P::Vector);
  }
  if (s.rows == s.cols) {
    add(v.holds, P::Square);
  } else if (ctx.known_distinct(s.rows, s.cols) || s.rows == "1" || s.cols == "1") {
    for (P p : {P::Square, P::Symmetric, P::SPD, P::Diagonal, P::LowerTriangular,
                P::UpperTriangular, P::OrthogonalSquare, P::Identity})
      add(v.fails, p);
    if (ctx.known_greater(s.cols, s.rows)) add(v.fails, P::OrthonormalColumns);
  }
  return v;
}

PropertySet keep(const PropertySet& s, std::initializer_list<P> ps) {
  PropertySet mask = props(ps);
  return s & mask;
}

const PropertySet kStructure = props({P::Symmetric, P::Diagonal, P::LowerTriangular,
                                      P::UpperTriangular});

bool is_literal(const Expr& e) { return e.is(NodeKind::Scalar); }

// Rank composition of two full-rank factors: the product keeps full rank
// whenever one side is square.
bool product_full_rank(const std::vector<Expr>& fs, const PropertyContext& ctx,
                       const InferenceRules& rules) {
  if (fs.empty()) return false;
  for (const auto& f : fs) {
    Verdicts v = infer(f, ctx, rules);
    if (v[P::FullRank] != Verdict::Holds) return false;
  }
  Shape acc = dims(fs[0], ctx);
  for (std::size_t i = 1; i < fs.size(); ++i) {
    Shape s = dims(fs[i], ctx);
    if (!(acc.is_square() || s.is_square())) return false;
    acc.cols = s.cols;
  }
  return true;
}

Expr product_of(std::vector<Expr> fs) {
  if (fs.size() == 1) return fs[0];
  return Expr::times(std::move(fs));
}

Verdicts infer_times(const Expr& e, const PropertyContext& ctx, const InferenceRules& rules) {
  Verdicts v;
  std::vector<Expr> mats;
  std::vector<Expr> scalars;
  for (const auto& f : e.children()) {
    if (f.is(NodeKind::Identity)) continue;
    if (dims(f, ctx).is_scalar()) {
      scalars.push_back(f);
    } else {
      mats.push_back(f);
    }
  }
  // Coefficient effect: literal nonzero keeps rank; positive keeps SPD; a
  // symbolic scalar has unknown sign and may vanish.
  bool coeff_nonzero = true;
  bool coeff_positive = true;
  bool coeff_unit = true;
  for (const auto& s : scalars) {
    if (is_literal(s)) {
      coeff_nonzero = coeff_nonzero && s.value() != Rational(0);
      coeff_positive = coeff_positive && s.value() > Rational(0);
      coeff_unit = coeff_unit && (s.value() == Rational(1) || s.value() == Rational(-1));
    } else {
      coeff_nonzero = coeff_positive = coeff_unit = false;
    }
  }

  if (mats.empty()) {
    bool has_identity = e.children().size() != scalars.size();
    if (!has_identity) {
      add(v.holds, P::Scalar);
      return v;
    }
    // Scaled identity.
    v.holds |= kStructure;
    if (coeff_nonzero) add(v.holds, P::FullRank);
    if (coeff_positive) add(v.holds, P::SPD);
    if (coeff_positive && coeff_unit) add(v.holds, P::Identity);
    return v;
  }

  std::vector<Verdicts> fv;
  fv.reserve(mats.size());
  for (const auto& f : mats) fv.push_back(infer(f, ctx, rules));
  auto all = [&](P p) {
    for (const auto& x : fv)
      if (x[p] != Verdict::Holds) return false;
    return true;
  };

  for (P p : {P::Diagonal, P::LowerTriangular, P::UpperTriangular})
    if (all(p)) add(v.holds, p);
  if (coeff_unit && all(P::OrthonormalColumns)) add(v.holds, P::OrthonormalColumns);
  if (coeff_unit && all(P::OrthogonalSquare)) add(v.holds, P::OrthogonalSquare);
  if (coeff_positive && coeff_unit && all(P::Identity)) add(v.holds, P::Identity);
  if (coeff_nonzero && product_full_rank(mats, ctx, rules)) add(v.holds, P::FullRank);

  // Palindromic products A1 .. Ak M Ak' .. A1' are symmetric; SPD when the
  // middle is SPD (or absent) and the right half has full column rank.
  const std::size_t k = mats.size();
  bool palindrome = true;
  for (std::size_t i = 0; i < k / 2 && palindrome; ++i)
    palindrome = mats[i] == light_transpose(mats[k - 1 - i], ctx);
  if (palindrome) {
    bool middle_sym = true;
    bool middle_spd = true;
    if (k % 2 == 1) {
      middle_sym = fv[k / 2][P::Symmetric] == Verdict::Holds;
      middle_spd = fv[k / 2][P::SPD] == Verdict::Holds;
    }
    if (middle_sym) add(v.holds, P::Symmetric);
    if (middle_spd && coeff_positive) {
      std::vector<Expr> right(mats.begin() + static_cast<std::ptrdiff_t>(k / 2 + k % 2), mats.end());
      if (right.empty()) {
        if (k == 1) add(v.holds, P::SPD);
      } else {
        Expr r = product_of(right);
        Shape rs = dims(r, ctx);
        if (infer(r, ctx, rules)[P::FullRank] == Verdict::Holds && known_tall_or_square(rs, ctx))
          add(v.holds, P::SPD);
      }
    }
  }
  return v;
}

Verdicts infer_node(const Expr& e, const PropertyContext& ctx, const InferenceRules& rules) {
  Verdicts v;
  switch (e.kind()) {
    case NodeKind::Operand:
      v.holds = ctx.operand(e.name()).properties;
      break;
    case NodeKind::Scalar:
      add(v.holds, P::Scalar);
      if (e.value() != Rational(0)) add(v.holds, P::FullRank);
      if (e.value() > Rational(0)) add(v.holds, P::SPD);
      break;
    case NodeKind::Identity:
      add(v.holds, P::Identity);
      break;
    case NodeKind::Negate: {
      Verdicts c = infer(e.child(), ctx, rules);
      v.holds = keep(c.holds, {P::Symmetric, P::Diagonal, P::LowerTriangular, P::UpperTriangular,
                               P::FullRank, P::Scalar});
      break;
    }
    case NodeKind::Transpose: {
      Verdicts c = infer(e.child(), ctx, rules);
      v.holds = keep(c.holds, {P::Diagonal, P::Symmetric, P::SPD, P::FullRank, P::Identity,
                               P::OrthogonalSquare, P::Scalar});
      if (c[P::LowerTriangular] == Verdict::Holds) add(v.holds, P::UpperTriangular);
      if (c[P::UpperTriangular] == Verdict::Holds) add(v.holds, P::LowerTriangular);
      break;
    }
    case NodeKind::Inverse: {
      Verdicts c = infer(e.child(), ctx, rules);
      v.holds = keep(c.holds, {P::Diagonal, P::LowerTriangular, P::UpperTriangular, P::SPD,
                               P::Symmetric, P::OrthogonalSquare, P::Identity, P::Scalar});
      add(v.holds, P::FullRank);
      break;
    }
    case NodeKind::Plus: {
      std::vector<Verdicts> tv;
      for (const auto& t : e.children()) tv.push_back(infer(t, ctx, rules));
      for (P p : {P::Symmetric, P::Diagonal, P::LowerTriangular, P::UpperTriangular, P::SPD,
                  P::Scalar}) {
        bool all = true;
        for (const auto& t : tv) all = all && t[p] == Verdict::Holds;
        if (all) add(v.holds, p);
      }
      break;
    }
    case NodeKind::Times:
      v = infer_times(e, ctx, rules);
      break;
  }
  v.holds |= ctx.asserted(e);
  return v;
}

}  // namespace

Verdicts infer(const Expr& e, const PropertyContext& ctx, const InferenceRules& rules) {
  Shape s = dims(e, ctx);
  Verdicts v = infer_node(e, ctx, rules);
  for (const auto& rule : rules.rules()) {
    if ((v.holds & rule.implies) == rule.implies) continue;
    if (rule.applies(e, ctx)) v.holds |= rule.implies;
  }
  Verdicts sv = shape_verdicts(s, ctx);
  v.holds = implication_closure(v.holds | sv.holds);
  v.fails = (v.fails | sv.fails) & ~v.holds;
  return v;
}

const InferenceRules& InferenceRules::defaults() {
  static const InferenceRules rules = [] {
    InferenceRules r;
    // times[trans[A], A] with A full rank and rows[A] > cols[A] is SPD
    // (and the mirrored A*A' for a wide A).
    r.add({"gram-spd",
           [](const Expr& e, const PropertyContext& ctx) {
             if (!e.is(NodeKind::Times) || e.children().size() != 2) return false;
             const Expr& a = e.children()[0];
             const Expr& b = e.children()[1];
             const Expr* base = nullptr;
             if (a.is(NodeKind::Transpose) && a.child() == b) base = &b;
             if (b.is(NodeKind::Transpose) && b.child() == a) base = &b;
             if (!base) return false;
             Shape s = dims(*base, ctx);
             if (!ctx.known_greater(s.rows, s.cols) && s.rows != s.cols) return false;
             return infer(*base, ctx)[Property::FullRank] == Verdict::Holds;
           },
           props({Property::SPD})});
    return r;
  }();
  return rules;
}

std::string_view factorization_name(Factorization f) {
  switch (f) {
    case Factorization::Cholesky: return "cholesky";
    case Factorization::QR: return "qr";
    case Factorization::Eig: return "eig";
    case Factorization::SVD: return "svd";
  }
  return "?";
}

std::optional<Factorization> factorization_from_name(std::string_view name) {
  for (auto f : {Factorization::Cholesky, Factorization::QR, Factorization::Eig, Factorization::SVD})
    if (factorization_name(f) == name) return f;
  return std::nullopt;
}

FactorPlan factor_output_properties(Factorization kind, const PropertySet& operand,
                                    const Shape& shape, const PropertyContext& ctx) {
  auto reject = [&](const char* why) -> FactorPlan {
    throw ContextError(std::string(factorization_name(kind)) + " is not viable for a " +
                       to_string(shape) + " operand with " + to_string(operand) + ": " + why);
  };
  const std::string& r = shape.rows;
  const std::string& c = shape.cols;
  FactorPlan plan;
  switch (kind) {
    case Factorization::Cholesky:
      if (!has(operand, P::SPD)) return reject("operand is not SPD");
      plan.outputs = {{"L", props({P::Square, P::LowerTriangular, P::FullRank}), {r, r}}};
      plan.reconstruct = [](const std::vector<std::string>& n) {
        return Expr::times({Expr::operand(n[0]), Expr::trans(Expr::operand(n[0]))});
      };
      return plan;
    case Factorization::QR: {
      if (!has(operand, P::FullRank)) return reject("operand is not full rank");
      if (!(r == c || ctx.known_greater(r, c))) return reject("operand is not tall");
      PropertySet q = props({P::OrthonormalColumns});
      if (r == c) add(q, P::OrthogonalSquare);
      plan.outputs = {{"Q", q, {r, c}},
                      {"R", props({P::UpperTriangular, P::Square, P::FullRank}), {c, c}}};
      plan.reconstruct = [](const std::vector<std::string>& n) {
        return Expr::times({Expr::operand(n[0]), Expr::operand(n[1])});
      };
      return plan;
    }
    case Factorization::Eig: {
      if (!has(operand, P::Symmetric) || r != c) return reject("operand is not symmetric");
      PropertySet w = props({P::Diagonal, P::Square});
      if (has(operand, P::FullRank)) add(w, P::FullRank);
      if (has(operand, P::SPD)) add(w, P::SPD);
      plan.outputs = {{"Z", props({P::OrthogonalSquare}), {r, r}}, {"W", w, {r, r}}};
      plan.reconstruct = [](const std::vector<std::string>& n) {
        return Expr::times(
            {Expr::operand(n[0]), Expr::operand(n[1]), Expr::trans(Expr::operand(n[0]))});
      };
      return plan;
    }
    case Factorization::SVD: {
      std::string k;
      if (r == c || ctx.known_greater(r, c)) {
        k = c;
      } else if (ctx.known_greater(c, r)) {
        k = r;
      } else {
        return reject("relative size of rows and columns is unknown");
      }
      PropertySet u = props({P::OrthonormalColumns});
      if (r == k) add(u, P::OrthogonalSquare);
      PropertySet v = props({P::OrthonormalColumns});
      if (c == k) add(v, P::OrthogonalSquare);
      PropertySet s = props({P::Diagonal, P::Square});
      if (has(operand, P::FullRank)) add(s, P::SPD);
      plan.outputs = {{"U", u, {r, k}}, {"S", s, {k, k}}, {"V", v, {c, k}}};
      plan.reconstruct = [](const std::vector<std::string>& n) {
        return Expr::times(
            {Expr::operand(n[0]), Expr::operand(n[1]), Expr::trans(Expr::operand(n[2]))});
      };
      return plan;
    }
  }
  return reject("unknown factorization");
}

}  // namespace lacomp
