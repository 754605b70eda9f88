#include "lacomp/derivation.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

#include "lacomp/properties.hpp"

namespace lacomp {

namespace {

using P = Property;

bool is_atom(const Expr& e) {
  return e.is(NodeKind::Operand) || (e.is(NodeKind::Transpose) && e.child().is(NodeKind::Operand));
}

const std::string& atom_name(const Expr& e) {
  return e.is(NodeKind::Operand) ? e.name() : e.child().name();
}

bool processed_inverse(const Expr& inv, const PropertyContext& ctx) {
  const Expr& body = inv.child();
  if (is_scalar_valued(body, ctx)) return true;
  if (!is_atom(body)) return false;
  const PropertySet& p = ctx.operand(atom_name(body)).properties;
  return has(p, P::Diagonal) || has(p, P::LowerTriangular) || has(p, P::UpperTriangular) ||
         has(p, P::OrthonormalColumns);
}

// Text of `e` with each temporary rendered as its definition.
std::string expanded(const Expr& e, const DerivationNode& node) {
  return e.str([&](const std::string& n) {
    auto it = node.definitions.find(n);
    return it == node.definitions.end() ? n : "{" + it->second + "}";
  });
}

std::string fresh(DerivationNode& node) { return "_" + std::to_string(node.next_temp++); }

const PropertySet kRoleless = props({P::InputOperand, P::OutputOperand});

std::vector<std::string> role_names(Factorization f) {
  switch (f) {
    case Factorization::Cholesky: return {"L"};
    case Factorization::QR: return {"Q", "R"};
    case Factorization::Eig: return {"Z", "W"};
    case Factorization::SVD: return {"U", "S", "V"};
  }
  return {};
}

// Factorization of operand `a`, plus the identity-expansion variants when a
// square orthogonal factor is created.
std::vector<DerivationNode> factor_children(const DerivationNode& node, const std::string& a,
                                            Factorization kind, const Catalog& catalog) {
  std::vector<DerivationNode> out;
  const OperandInfo& info = node.ctx.operand(a);
  FactorPlan plan;
  try {
    plan = factor_output_properties(kind, info.properties, info.shape, node.ctx);
  } catch (const ContextError&) {
    return out;
  }
  DerivationNode child = node;
  child.depth = node.depth + 1;
  std::vector<std::string> names;
  bool orthogonal = false;
  std::vector<std::string> roles = role_names(kind);
  const FactorizationEntry& entry = catalog.factorization(kind);
  for (std::size_t i = 0; i < plan.outputs.size(); ++i) {
    std::string n = fresh(child);
    names.push_back(n);
    child.ctx.declare_operand(n, plan.outputs[i].properties, plan.outputs[i].shape);
    orthogonal = orthogonal || has(plan.outputs[i].properties, P::OrthogonalSquare);
    child.definitions[n] =
        entry.name + "(" + expanded(Expr::operand(a), node) + ")." + roles[i];
  }
  Expr with = plan.reconstruct(names);

  std::vector<std::pair<Expr, PropertySet>> assertions;
  for (const auto& [e, ps] : node.ctx.assertions()) {
    auto used = e.operands();
    if (std::find(used.begin(), used.end(), a) == used.end()) {
      assertions.emplace_back(e, ps);
    } else {
      assertions.emplace_back(simplify(e.substitute(a, with), child.ctx), ps);
    }
  }
  child.ctx.replace_assertions(std::move(assertions));

  KernelCall call;
  call.kernel = entry.name;
  call.factorization = kind;
  call.inputs = {{"A", Expr::operand(a)}};
  call.outputs = names;
  call.value = Expr::operand(a);
  call.cost = catalog.factorization_cost(kind, info.shape);
  child.statements.push_back(call);

  Expr base = simplify(node.rhs.substitute(a, with), child.ctx);
  child.rhs = base;
  out.push_back(child);
  if (orthogonal) {
    for (const auto& v : expand_identity(base, child.ctx)) {
      Expr s = simplify(v, child.ctx);
      if (s == base) continue;
      bool dup = std::any_of(out.begin(), out.end(), [&](const DerivationNode& d) { return d.rhs == s; });
      if (dup) continue;
      DerivationNode variant = child;
      variant.rhs = s;
      out.push_back(std::move(variant));
    }
  }
  return out;
}

std::optional<DerivationNode> segment_child(const DerivationNode& node, const SegmentCandidate& cand,
                                            const std::optional<Expr>& inverse_body) {
  const Expr& seg = cand.match.segment;
  DerivationNode child = node;
  child.depth = node.depth + 1;
  std::string t = fresh(child);
  Shape shape = dims(seg, node.ctx);
  PropertySet ps = infer(seg, node.ctx).holds & ~kRoleless;
  // A computed inverse body of a well-posed equation is invertible.
  if (inverse_body && shape.is_square() &&
      (seg == *inverse_body || seg == transpose_of(*inverse_body, node.ctx)))
    add(ps, P::FullRank);
  child.ctx.declare_operand(t, ps, shape);
  child.definitions[t] = expanded(seg, node);

  KernelCall call;
  call.kernel = cand.match.pattern->name;
  call.variant = cand.match.pattern->variant;
  call.inputs = cand.match.bindings;
  call.outputs = {t};
  call.value = seg;
  call.cost = cand.cost;
  child.statements.push_back(call);

  child.rhs = simplify(replace_segment(node.rhs, seg, Expr::operand(t), child.ctx), child.ctx);
  if (child.rhs == node.rhs) return std::nullopt;
  return child;
}

Expr orientation_key(const Expr& s, const PropertyContext& ctx) {
  return std::min(s, transpose_of(s, ctx));
}

std::vector<SegmentCandidate> candidates_of(const std::vector<SegmentCount>& segs,
                                            const PropertyContext& ctx, const Catalog& catalog) {
  std::vector<SegmentCandidate> out;
  for (const auto& s : segs) {
    auto m = catalog.best_match(s.segment, ctx);
    if (!m) continue;
    out.push_back({s.segment, s.count, *m, catalog.cost_of(*m, ctx)});
  }
  return out;
}

// True when a segment multiplies outputs of one factorization back together.
bool recombines_factors(const Expr& seg, const DerivationNode& node) {
  std::map<std::string, std::size_t> group;
  for (std::size_t i = 0; i < node.statements.size(); ++i)
    if (node.statements[i].factorization)
      for (const auto& o : node.statements[i].outputs) group[o] = i;
  std::map<std::size_t, int> uses;
  bool again = false;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.is(NodeKind::Operand)) {
      auto it = group.find(x.name());
      if (it != group.end() && ++uses[it->second] > 1) again = true;
      return;
    }
    for (const auto& c : x.children()) walk(c);
  };
  walk(seg);
  return again;
}

std::size_t catalog_index(const KernelPattern* p, const Catalog& catalog) {
  const auto& ks = catalog.kernels();
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (&ks[i] == p) return i;
  return ks.size();
}

void append(std::vector<DerivationNode>& out, std::vector<DerivationNode> more) {
  for (auto& n : more) out.push_back(std::move(n));
}

std::vector<std::string> distinct_operands(const Expr& e) { return e.operands(); }

}  // namespace

std::string DerivationNode::key() const { return expanded(rhs, *this); }

InverseTarget classify_inverse(const Expr& e, const PropertyContext& ctx) {
  std::optional<Expr> found;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (found) return;
    for (const auto& c : x.children()) {
      walk(c);
      if (found) return;
    }
    if (x.is(NodeKind::Inverse) && !processed_inverse(x, ctx)) found = x;
  };
  walk(e);
  if (!found) return {};
  InverseClass k = is_atom(found->child()) ? InverseClass::SingleOperand
                                           : InverseClass::ExpressionInverse;
  return {k, *found};
}

std::map<std::string, double> reference_point(const PropertyContext& ctx) {
  std::map<std::string, double> point;
  for (const auto& s : ctx.size_symbols()) {
    bool larger = false;
    for (const auto& o : ctx.size_symbols()) larger = larger || ctx.known_greater(s, o);
    point[s] = larger ? 1000.0 : 10.0;
  }
  if (point.count("n")) point["n"] = 1000.0;
  if (point.count("p")) point["p"] = 10.0;
  for (const char* ext : {"m", "t"}) point.emplace(ext, 100.0);
  return point;
}

std::vector<SegmentCandidate> rank_segments(std::vector<SegmentCandidate> candidates,
                                            const PropertyContext& ctx, const Catalog& catalog) {
  auto point = reference_point(ctx);
  std::vector<double> flops;
  std::vector<std::size_t> pos;
  for (const auto& c : candidates) {
    flops.push_back(c.cost.evaluate_double(point));
    pos.push_back(catalog_index(c.match.pattern, catalog));
  }
  std::vector<std::size_t> idx(candidates.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].count != candidates[b].count) return candidates[a].count > candidates[b].count;
    if (flops[a] != flops[b]) return flops[a] < flops[b];
    return pos[a] < pos[b];
  });
  std::vector<SegmentCandidate> out;
  for (auto i : idx) out.push_back(std::move(candidates[i]));
  return out;
}

std::vector<DerivationNode> expand_node(const DerivationNode& node, const Catalog& catalog,
                                        const DerivationLimits& limits) {
  std::vector<DerivationNode> out;
  if (node.is_leaf()) return out;
  const PropertyContext& ctx = node.ctx;
  InverseTarget cls = classify_inverse(node.rhs, ctx);

  auto add_segments = [&](std::vector<SegmentCandidate> cands, const std::optional<Expr>& body) {
    cands = rank_segments(std::move(cands), ctx, catalog);
    if (limits.top_k > 0 && cands.size() > limits.top_k) cands.resize(limits.top_k);
    for (const auto& c : cands) {
      if (recombines_factors(c.segment, node)) continue;
      if (auto child = segment_child(node, c, body)) out.push_back(std::move(*child));
    }
  };

  switch (cls.kind) {
    case InverseClass::SingleOperand: {
      const std::string& a = atom_name(cls.target.child());
      for (Factorization f : viable_factorizations(a, ctx))
        append(out, factor_children(node, a, f, catalog));
      break;
    }
    case InverseClass::ExpressionInverse: {
      const Expr& body = cls.target.child();
      // The SVD is offered for operands inverted on their own only.
      for (const auto& a : distinct_operands(body))
        for (Factorization f : viable_factorizations(a, ctx))
          if (f != Factorization::SVD) append(out, factor_children(node, a, f, catalog));
      std::set<Expr> inner;
      for (const auto& s : find_segments(body, ctx)) inner.insert(orientation_key(s.segment, ctx));
      std::vector<SegmentCount> segs;
      for (const auto& s : find_segments(node.rhs, ctx))
        if (inner.count(orientation_key(s.segment, ctx))) segs.push_back(s);
      add_segments(candidates_of(segs, ctx, catalog), body);
      break;
    }
    case InverseClass::None: {
      int vectors = 0;
      for (const auto& n : node.rhs.operands())
        if (ctx.operand(n).shape.is_vector()) ++vectors;
      const Expr& r = node.rhs;
      if (vectors == 1 && r.is(NodeKind::Times) && dims(r.children().back(), ctx).is_vector()) {
        // Right-to-left: only the trailing matrix-vector product.
        auto f = r.children();
        Expr window = canonicalize(Expr::times({f[f.size() - 2], f[f.size() - 1]}), ctx);
        auto cands = candidates_of({{window, 1}}, ctx, catalog);
        if (!cands.empty()) {
          add_segments(std::move(cands), std::nullopt);
          break;
        }
      }
      add_segments(candidates_of(find_segments(r, ctx), ctx, catalog), std::nullopt);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CostPolynomial Algorithm::cost() const {
  CostPolynomial c;
  for (const auto& s : statements) c += s.cost;
  return c;
}

std::vector<std::string> Algorithm::kernel_sequence() const {
  std::vector<std::string> out;
  for (const auto& s : statements) out.push_back(s.kernel);
  return out;
}

std::string statement_text(const KernelCall& call) {
  if (call.factorization) {
    std::vector<Expr> ops;
    for (const auto& o : call.outputs) ops.push_back(Expr::operand(o));
    std::string lhs;
    switch (*call.factorization) {
      case Factorization::Cholesky:
        lhs = Expr::times({ops[0], Expr::trans(ops[0])}).str();
        break;
      case Factorization::QR:
        lhs = Expr::times({ops[0], ops[1]}).str();
        break;
      case Factorization::Eig:
        lhs = Expr::times({ops[0], ops[1], Expr::trans(ops[0])}).str();
        break;
      case Factorization::SVD:
        lhs = Expr::times({ops[0], ops[1], Expr::trans(ops[2])}).str();
        break;
    }
    return lhs + " = " + call.value.str();
  }
  return call.outputs.at(0) + " := " + call.value.str();
}

std::string Algorithm::listing() const {
  std::string out;
  for (const auto& s : statements) out += statement_text(s) + "  (" + s.label() + ")\n";
  return out;
}

namespace {

std::string preferred_name(const KernelCall& call, std::size_t output, const PropertyContext& ctx) {
  if (call.factorization) return role_names(*call.factorization).at(output);
  Shape s = ctx.operand(call.outputs[output]).shape;
  if (s.is_vector()) return "v";
  if (s.is_scalar()) return "s";
  if (call.kernel == "scal-add") return call.variant == "diag" ? "D" : "M";
  if (call.kernel == "trsm") return "W";
  if (call.kernel == "syrk") return "S";
  if (call.kernel == "gemm") return s.is_square() ? "S" : "K";
  if (call.kernel == "scal") return "V";
  return "T";
}

// Drops dead statements and gives temporaries display names.
std::optional<Algorithm> finalize(const DerivationNode& leaf, const Equation& eq,
                                  const PropertyContext& inputs) {
  const std::string& result = leaf.rhs.name();
  std::vector<KernelCall> live;
  std::set<std::string> needed{result};
  for (auto it = leaf.statements.rbegin(); it != leaf.statements.rend(); ++it) {
    bool used = std::any_of(it->outputs.begin(), it->outputs.end(),
                            [&](const std::string& o) { return needed.count(o) > 0; });
    if (!used) continue;
    for (const auto& r : it->reads()) needed.insert(r);
    live.push_back(*it);
  }
  std::reverse(live.begin(), live.end());

  std::map<std::string, std::string> rename;
  std::set<std::string> taken;
  for (const auto& [n, info] : inputs.operands()) taken.insert(n);
  bool temp_result = leaf.definitions.count(result) > 0;
  if (temp_result) rename[result] = eq.output;
  for (const auto& call : live) {
    for (std::size_t i = 0; i < call.outputs.size(); ++i) {
      const std::string& o = call.outputs[i];
      if (rename.count(o)) continue;
      std::string base = preferred_name(call, i, leaf.ctx);
      // Vector temporaries are numbered from 1; other names get a suffix on reuse.
      int k = base == "v" ? 1 : 0;
      std::string name = k ? base + "1" : base;
      while (taken.count(name)) name = base + std::to_string(k = std::max(k, 1) + 1);
      taken.insert(name);
      rename[o] = name;
    }
  }
  auto ren = [&](const Expr& e) {
    return e.map([&](const Expr& x) {
      if (x.is(NodeKind::Operand)) {
        auto it = rename.find(x.name());
        if (it != rename.end()) return Expr::operand(it->second);
      }
      return x;
    });
  };

  Algorithm alg;
  alg.output = temp_result ? eq.output : result;
  alg.ctx = inputs;
  for (auto call : live) {
    for (auto& [hole, e] : call.inputs) e = ren(e);
    call.value = ren(call.value);
    for (auto& o : call.outputs) {
      const OperandInfo& info = leaf.ctx.operand(o);
      o = rename.at(o);
      if (o != eq.output) alg.ctx.declare_operand(o, info.properties, info.shape);
    }
    alg.statements.push_back(std::move(call));
  }
  return alg;
}

}  // namespace

DerivationResult derive(const Equation& eq, const PropertyContext& ctx,
                        const DerivationLimits& limits, const Catalog& catalog) {
  validate_equation(eq, ctx);
  DerivationResult result;
  DerivationStats& st = result.stats;

  DerivationNode root;
  root.ctx = ctx;
  root.rhs = simplify(eq.rhs, ctx);

  std::deque<DerivationNode> queue;
  std::unordered_set<std::string> seen;
  std::vector<DerivationNode> leaves;
  if (root.is_leaf()) {
    leaves.push_back(root);
  } else {
    seen.insert(root.key());
    queue.push_back(root);
    st.nodes_created = 1;
  }

  while (!queue.empty() && !st.node_limit_hit) {
    DerivationNode node = std::move(queue.front());
    queue.pop_front();
    if (node.depth >= limits.max_depth) {
      ++st.dead_ends;
      continue;
    }
    std::vector<DerivationNode> children = expand_node(node, catalog, limits);
    ++st.nodes_expanded;
    if (children.empty()) ++st.dead_ends;
    for (auto& c : children) {
      if (c.is_leaf()) {
        ++st.leaves;
        leaves.push_back(std::move(c));
        continue;
      }
      if (!seen.insert(c.key()).second) {
        ++st.duplicates;
        continue;
      }
      if (st.nodes_created >= limits.max_nodes) {
        st.node_limit_hit = true;
        break;
      }
      ++st.nodes_created;
      queue.push_back(std::move(c));
    }
  }

  std::set<std::string> signatures;
  for (const auto& leaf : leaves) {
    auto alg = finalize(leaf, eq, ctx);
    if (!alg) continue;
    if (!signatures.insert(alg->listing()).second) continue;
    result.algorithms.push_back(std::move(*alg));
  }
  if (result.algorithms.empty())
    throw NoAlgorithmError("no algorithm within limits (max depth " +
                           std::to_string(limits.max_depth) + ", max nodes " +
                           std::to_string(limits.max_nodes) + ")");

  auto point = reference_point(ctx);
  std::vector<double> flops;
  for (const auto& a : result.algorithms) flops.push_back(a.cost().evaluate_double(point));
  std::vector<std::size_t> idx(flops.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return flops[a] < flops[b]; });
  std::vector<Algorithm> sorted;
  for (auto i : idx) sorted.push_back(std::move(result.algorithms[i]));
  if (limits.max_algorithms > 0 && sorted.size() > limits.max_algorithms) sorted.resize(limits.max_algorithms);
  for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i].name = "alg-" + std::to_string(i + 1);
  result.algorithms = std::move(sorted);
  return result;
}

}  // namespace lacomp
