#include "lacomp/rewrite.hpp"

#include <algorithm>
#include <map>

#include "lacomp/properties.hpp"

namespace lacomp {

namespace {

bool scalar_valued(const Expr& e, const PropertyContext& ctx) { return dims(e, ctx).is_scalar(); }

Expr canon(const Expr& e, const PropertyContext& ctx);

Expr canon_times(const std::vector<Expr>& factors, const PropertyContext& ctx) {
  Rational coeff(1);
  std::vector<Expr> scalars;
  std::vector<Expr> mats;
  bool saw_identity = false;

  // Appends one canonical factor, splicing nested products.
  std::function<void(const Expr&)> push = [&](const Expr& f) {
    if (f.is(NodeKind::Scalar)) {
      coeff *= f.value();
      return;
    }
    if (f.is(NodeKind::Identity)) {
      saw_identity = true;
      return;
    }
    if (scalar_valued(f, ctx)) {
      if (f.is(NodeKind::Times) &&
          std::all_of(f.children().begin(), f.children().end(),
                      [&](const Expr& c) { return scalar_valued(c, ctx); })) {
        for (const auto& c : f.children()) push(c);
      } else {
        scalars.push_back(f);
      }
      return;
    }
    if (f.is(NodeKind::Times)) {
      for (const auto& c : f.children()) push(c);
      return;
    }
    mats.push_back(f);
  };
  for (const auto& f : factors) push(f);

  std::sort(scalars.begin(), scalars.end());
  std::vector<Expr> out;
  if (coeff != Rational(1) || (scalars.empty() && mats.empty() && !saw_identity)) out.push_back(Expr::scalar(coeff));
  out.insert(out.end(), scalars.begin(), scalars.end());
  out.insert(out.end(), mats.begin(), mats.end());
  if (mats.empty() && saw_identity) out.push_back(Expr::identity());
  if (out.size() == 1) return out[0];
  return Expr::times(std::move(out));
}

Expr canon_plus(const std::vector<Expr>& terms, const PropertyContext& ctx) {
  Rational lit(0);
  bool saw_lit = false;
  std::vector<Expr> rest;
  std::function<void(const Expr&)> push = [&](const Expr& t) {
    if (t.is(NodeKind::Plus)) {
      for (const auto& c : t.children()) push(c);
    } else if (t.is(NodeKind::Scalar)) {
      lit += t.value();
      saw_lit = true;
    } else {
      rest.push_back(t);
    }
  };
  for (const auto& t : terms) push(t);

  // Like terms: equal up to the leading literal coefficient.
  std::vector<std::pair<Expr, Rational>> like;
  for (const auto& t : rest) {
    Rational c(1);
    Expr body = t;
    if (t.is(NodeKind::Times) && t.children()[0].is(NodeKind::Scalar)) {
      c = t.children()[0].value();
      std::vector<Expr> others(t.children().begin() + 1, t.children().end());
      body = others.size() == 1 ? others[0] : Expr::times(std::move(others));
    }
    auto it = std::find_if(like.begin(), like.end(), [&](const auto& l) { return l.first == body; });
    if (it == like.end()) {
      like.emplace_back(body, c);
    } else {
      it->second += c;
    }
  }
  rest.clear();
  for (const auto& [body, c] : like) {
    if (c == Rational(0)) continue;
    rest.push_back(c == Rational(1) ? body : canon_times({Expr::scalar(c), body}, ctx));
  }
  // A sum that cancels keeps its shape as 0*X.
  if (rest.empty() && !like.empty() && !scalar_valued(like.front().first, ctx)) {
    if (saw_lit) throw DimensionError("literal added to a matrix");
    return canon_times({Expr::scalar(0), like.front().first}, ctx);
  }

  if (saw_lit && (lit != Rational(0) || rest.empty())) rest.push_back(Expr::scalar(lit));
  if (rest.empty()) return Expr::scalar(0);
  std::sort(rest.begin(), rest.end());
  if (rest.size() == 1) return rest[0];
  return Expr::plus(std::move(rest));
}

Expr canon_inv(const Expr& c) {
  switch (c.kind()) {
    case NodeKind::Scalar:
      if (c.value() == Rational(0)) throw DimensionError("inverse of the zero literal");
      return Expr::scalar(Rational(1) / c.value());
    case NodeKind::Inverse:
      return c.child();
    case NodeKind::Identity:
      return c;
    default:
      return Expr::inv(c);
  }
}

// Transpose of an already-canonical expression.
Expr push_trans(const Expr& c, const PropertyContext& ctx) {
  if (scalar_valued(c, ctx)) return c;
  switch (c.kind()) {
    case NodeKind::Operand:
      return Expr::trans(c);
    case NodeKind::Identity:
      return c;
    case NodeKind::Transpose:
      return c.child();
    case NodeKind::Plus: {
      std::vector<Expr> ts;
      for (const auto& t : c.children()) ts.push_back(push_trans(t, ctx));
      return canon_plus(ts, ctx);
    }
    case NodeKind::Times: {
      std::vector<Expr> fs;
      auto kids = c.children();
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) fs.push_back(push_trans(*it, ctx));
      return canon_times(fs, ctx);
    }
    case NodeKind::Inverse:
      return canon_inv(push_trans(c.child(), ctx));
    default:
      return Expr::trans(c);
  }
}

Expr canon(const Expr& e, const PropertyContext& ctx) {
  switch (e.kind()) {
    case NodeKind::Operand:
    case NodeKind::Scalar:
    case NodeKind::Identity:
      return e;
    case NodeKind::Negate: {
      Expr c = canon(e.child(), ctx);
      if (c.is(NodeKind::Scalar)) return Expr::scalar(-c.value());
      if (c.is(NodeKind::Plus)) {
        std::vector<Expr> ts;
        for (const auto& t : c.children()) ts.push_back(canon_times({Expr::scalar(-1), t}, ctx));
        return canon_plus(ts, ctx);
      }
      return canon_times({Expr::scalar(-1), c}, ctx);
    }
    case NodeKind::Transpose:
      return push_trans(canon(e.child(), ctx), ctx);
    case NodeKind::Inverse:
      return canon_inv(canon(e.child(), ctx));
    case NodeKind::Plus: {
      std::vector<Expr> ts;
      for (const auto& t : e.children()) ts.push_back(canon(t, ctx));
      return canon_plus(ts, ctx);
    }
    case NodeKind::Times: {
      std::vector<Expr> fs;
      for (const auto& f : e.children()) fs.push_back(canon(f, ctx));
      return canon_times(fs, ctx);
    }
  }
  return e;
}

// Splits a product term into scalar factors and matrix factors.
struct Term {
  std::vector<Expr> scalars;
  std::vector<Expr> mats;
};

Term split_term(const Expr& t, const PropertyContext& ctx) {
  Term out;
  if (t.is(NodeKind::Times)) {
    for (const auto& f : t.children()) {
      if (f.is(NodeKind::Identity)) continue;
      if (scalar_valued(f, ctx)) {
        out.scalars.push_back(f);
      } else {
        out.mats.push_back(f);
      }
    }
  } else if (!t.is(NodeKind::Identity)) {
    out.mats.push_back(t);
  }
  return out;
}

Expr rebuild_term(const Term& t, const PropertyContext& ctx) {
  std::vector<Expr> fs = t.scalars;
  fs.insert(fs.end(), t.mats.begin(), t.mats.end());
  if (t.mats.empty()) fs.push_back(Expr::identity());
  return canon_times(fs, ctx);
}

// Pulls a matrix factor shared by every term of a sum out to the left or right.
std::optional<Expr> group_common_factor(const Expr& sum, const PropertyContext& ctx) {
  std::vector<Term> terms;
  for (const auto& t : sum.children()) {
    if (scalar_valued(t, ctx)) return std::nullopt;
    terms.push_back(split_term(t, ctx));
    if (terms.back().mats.empty()) return std::nullopt;
  }
  for (int side = 0; side < 2; ++side) {
    const Expr& f = side == 0 ? terms[0].mats.front() : terms[0].mats.back();
    bool shared = std::all_of(terms.begin(), terms.end(), [&](const Term& t) {
      return (side == 0 ? t.mats.front() : t.mats.back()) == f;
    });
    if (!shared) continue;
    std::vector<Expr> rest;
    for (auto t : terms) {
      if (side == 0) {
        t.mats.erase(t.mats.begin());
      } else {
        t.mats.pop_back();
      }
      rest.push_back(rebuild_term(t, ctx));
    }
    Expr inner = canon_plus(rest, ctx);
    return side == 0 ? canon_times({f, inner}, ctx) : canon_times({inner, f}, ctx);
  }
  return std::nullopt;
}

bool is_operand_symmetric(const Expr& e, const PropertyContext& ctx) {
  return e.is(NodeKind::Operand) &&
         has(ctx.operand(e.name()).properties, Property::Symmetric);
}

// One bottom-up pass of the matrix rules at node `x`.
Expr rewrite_node(const Expr& x, const PropertyContext& ctx) {
  switch (x.kind()) {
    case NodeKind::Transpose:
      if (is_operand_symmetric(x.child(), ctx)) return x.child();
      return x;
    case NodeKind::Inverse: {
      const Expr& c = x.child();
      if (scalar_valued(c, ctx)) return x;
      if (infer(c, ctx)[Property::OrthogonalSquare] == Verdict::Holds) return push_trans(c, ctx);
      if (c.is(NodeKind::Times)) {
        // (A B)^-1 = B^-1 A^-1 holds when every factor is square: an
        // invertible product of square factors has invertible factors.
        bool all_square = true;
        for (const auto& f : c.children()) {
          Shape s = dims(f, ctx);
          if (!s.is_scalar() && !s.is_square()) {
            all_square = false;
            break;
          }
        }
        if (all_square) {
          std::vector<Expr> fs;
          auto kids = c.children();
          for (auto it = kids.rbegin(); it != kids.rend(); ++it) fs.push_back(canon_inv(*it));
          return canon_times(fs, ctx);
        }
      }
      return x;
    }
    case NodeKind::Times: {
      std::vector<Expr> fs(x.children().begin(), x.children().end());
      for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
        const Expr& a = fs[i];
        const Expr& b = fs[i + 1];
        bool cancel = false;
        if (a.is(NodeKind::Inverse) && a.child() == b) cancel = true;
        if (b.is(NodeKind::Inverse) && b.child() == a) cancel = true;
        // Only Q'*Q; Q*Q' is kept so identity expansions survive.
        if (!cancel && !b.is(NodeKind::Transpose) && !scalar_valued(b, ctx) &&
            a == light_transpose(b, ctx) &&
            infer(b, ctx)[Property::OrthonormalColumns] == Verdict::Holds)
          cancel = true;
        if (cancel) {
          fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(i),
                   fs.begin() + static_cast<std::ptrdiff_t>(i + 2));
          fs.push_back(Expr::identity());
          return canon_times(fs, ctx);
        }
      }
      return x;
    }
    case NodeKind::Plus:
      if (auto g = group_common_factor(x, ctx)) return *g;
      return x;
    default:
      return x;
  }
}

std::vector<Expr> factors_of(const Expr& e) {
  if (e.is(NodeKind::Times)) return {e.children().begin(), e.children().end()};
  return {e};
}

}  // namespace

Expr canonicalize(const Expr& e, const PropertyContext& ctx) {
  dims(e, ctx);
  return canon(e, ctx);
}

Expr simplify(const Expr& e, const PropertyContext& ctx, std::size_t node_budget) {
  Expr cur = canonicalize(e, ctx);
  for (int pass = 0; pass < 256; ++pass) {
    Expr next = canon(cur.map([&](const Expr& x) { return rewrite_node(x, ctx); }), ctx);
    if (next == cur) break;
    cur = next;
    if (cur.size() > node_budget) break;
  }
  return cur;
}

Expr transpose_of(const Expr& e, const PropertyContext& ctx) {
  return simplify(Expr::trans(e), ctx);
}

Expr light_transpose(const Expr& e, const PropertyContext& ctx) {
  Expr t = push_trans(canon(e, ctx), ctx);
  return t.map([&](const Expr& x) {
    if (x.is(NodeKind::Transpose) && is_operand_symmetric(x.child(), ctx)) return x.child();
    return x;
  });
}

std::vector<Expr> expand_identity(const Expr& e, const PropertyContext& ctx) {
  return expand_identity(e, ctx, e);
}

std::vector<Expr> expand_identity(const Expr& e, const PropertyContext& ctx, const Expr& scope) {
  std::vector<Expr> result;
  std::vector<std::string> orth;
  for (const auto& name : scope.operands()) {
    if (has(ctx.operand(name).properties, Property::OrthogonalSquare)) orth.push_back(name);
  }
  if (orth.empty()) return result;

  // Distinct nodes holding an identity child; each is rewritten everywhere
  // it occurs so equal subterms stay equal.
  std::vector<Expr> holders;
  std::function<void(const Expr&)> collect = [&](const Expr& x) {
    for (const auto& c : x.children()) {
      if (c.is(NodeKind::Identity)) {
        if (std::find(holders.begin(), holders.end(), x) == holders.end()) holders.push_back(x);
      } else {
        collect(c);
      }
    }
  };
  collect(e);

  Expr base = canonicalize(e, ctx);
  auto consider = [&](const Expr& variant) {
    try {
      Expr c = canonicalize(variant, ctx);
      if (c == base) return;
      if (std::find(result.begin(), result.end(), c) == result.end()) result.push_back(c);
    } catch (const DimensionError&) {
      // the orthogonal operand does not conform with this occurrence
    }
  };

  for (const auto& z : orth) {
    Expr zz = Expr::operand(z);
    for (const Expr& product : {Expr::times({zz, Expr::trans(zz)}), Expr::times({Expr::trans(zz), zz})}) {
      if (e.is(NodeKind::Identity)) {
        consider(product);
        continue;
      }
      for (const auto& holder : holders) {
        Expr variant = e.map([&](const Expr& x) {
          if (!(x == holder)) return x;
          std::vector<Expr> kids;
          for (const auto& c : x.children()) kids.push_back(c.is(NodeKind::Identity) ? product : c);
          return x.is(NodeKind::Plus) ? Expr::plus(std::move(kids)) : Expr::times(std::move(kids));
        });
        consider(variant);
      }
    }
  }
  return result;
}

std::vector<SegmentCount> find_segments(const Expr& e, const PropertyContext& ctx,
                                        const std::function<double(const Expr&)>& saving) {
  struct Entry {
    Expr key;
    SegmentCount seg;
    std::size_t order;
  };
  std::vector<Entry> entries;
  auto note = [&](const Expr& s) {
    Expr st = transpose_of(s, ctx);
    Expr key = std::min(s, st);
    for (auto& en : entries) {
      if (en.key == key) {
        ++en.seg.count;
        return;
      }
    }
    entries.push_back({key, {s, 1}, entries.size()});
  };
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.is(NodeKind::Times)) {
      auto f = x.children();
      for (std::size_t len = 2; len <= f.size(); ++len) {
        for (std::size_t i = 0; i + len <= f.size(); ++i) {
          std::vector<Expr> window(f.begin() + static_cast<std::ptrdiff_t>(i),
                                   f.begin() + static_cast<std::ptrdiff_t>(i + len));
          note(canon_times(window, ctx));
        }
      }
    } else if (x.is(NodeKind::Plus)) {
      note(x);
    }
    for (const auto& c : x.children()) walk(c);
  };
  walk(e);

  std::vector<double> score(entries.size(), 0.0);
  if (saving) {
    for (std::size_t i = 0; i < entries.size(); ++i) score[i] = saving(entries[i].seg.segment);
  }
  std::vector<std::size_t> idx(entries.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (entries[a].seg.count != entries[b].seg.count)
      return entries[a].seg.count > entries[b].seg.count;
    return score[a] > score[b];
  });
  std::vector<SegmentCount> out;
  for (auto i : idx) out.push_back(entries[i].seg);
  return out;
}

Expr replace_segment(const Expr& e, const Expr& segment, const Expr& with,
                     const PropertyContext& ctx) {
  const Expr seg = canonicalize(segment, ctx);
  const Expr seg_t = transpose_of(seg, ctx);
  const Expr with_t = light_transpose(with, ctx);
  const std::vector<Expr> sf = factors_of(seg);
  const std::vector<Expr> tf = factors_of(seg_t);

  Expr out = e.map([&](const Expr& x) {
    if (x == seg) return with;
    if (x == seg_t) return with_t;
    if (!x.is(NodeKind::Times) || sf.size() < 2) return x;
    auto f = x.children();
    std::vector<Expr> fs;
    bool changed = false;
    auto window_is = [&](std::size_t i, const std::vector<Expr>& w) {
      if (i + w.size() > f.size()) return false;
      for (std::size_t k = 0; k < w.size(); ++k)
        if (!(f[i + k] == w[k])) return false;
      return true;
    };
    for (std::size_t i = 0; i < f.size();) {
      if (window_is(i, sf)) {
        fs.push_back(with);
        i += sf.size();
        changed = true;
      } else if (tf.size() >= 2 && window_is(i, tf)) {
        fs.push_back(with_t);
        i += tf.size();
        changed = true;
      } else {
        fs.push_back(f[i]);
        ++i;
      }
    }
    if (!changed) return x;
    return canon_times(fs, ctx);
  });
  return canonicalize(out, ctx);
}

void assert_expression(PropertyContext& ctx, const Expr& e, PropertySet properties) {
  Expr c = simplify(e, ctx);
  ctx.add_assertion(c, properties);
  if (c.is(NodeKind::Inverse)) {
    PropertySet invariant = props({Property::SPD, Property::Symmetric, Property::Diagonal,
                                   Property::LowerTriangular, Property::UpperTriangular,
                                   Property::OrthogonalSquare, Property::FullRank,
                                   Property::Identity, Property::Square});
    ctx.add_assertion(c.child(), implication_closure(properties) & invariant);
  }
}

void validate_equation(const Equation& eq, const PropertyContext& ctx) {
  const OperandInfo& out = ctx.operand(eq.output);
  auto used = eq.rhs.operands();
  if (std::find(used.begin(), used.end(), eq.output) != used.end())
    throw ContextError("output '" + eq.output + "' appears on the right-hand side");
  Shape s = dims(eq.rhs, ctx);
  if (!(s == out.shape))
    throw DimensionError("right-hand side is " + to_string(s) + " but '" + eq.output + "' is " +
                         to_string(out.shape));
}

}  // namespace lacomp
