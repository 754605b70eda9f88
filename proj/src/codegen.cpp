#include "lacomp/codegen.hpp"

#include <functional>
#include <regex>

namespace lacomp {

namespace {

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
  return out;
}

// "K[i,j]" for a temporary kept per index, "K" otherwise.
std::string indexed(const std::string& name, const std::set<std::string>& idx) {
  return idx.empty() ? name : name + "[" + join(idx) + "]";
}

struct Builder {
  const ScheduledAlgorithm& sched;
  std::map<std::string, std::set<std::string>> temp_deps;

  std::set<std::string> reads(const LoopNode& node) const {
    std::set<std::string> out;
    for (const auto& item : node.body) {
      if (item.is_loop) {
        auto r = reads(node.children[item.loop]);
        out.insert(r.begin(), r.end());
      } else {
        for (const auto& n : sched.algorithm.statements[item.statement].reads()) out.insert(n);
      }
    }
    return out;
  }

  Expr rename(const Expr& e, const std::map<std::string, std::string>& scope) const {
    return e.map([&](const Expr& x) {
      if (!x.is(NodeKind::Operand)) return x;
      auto t = temp_deps.find(x.name());
      if (t != temp_deps.end()) return Expr::operand(indexed(x.name(), t->second));
      auto s = scope.find(x.name());
      return s == scope.end() ? x : Expr::operand(s->second);
    });
  }

  void walk(const LoopNode& node, CodeNode& block, const std::map<std::string, std::string>& scope) const {
    for (const auto& item : node.body) {
      if (!item.is_loop) {
        KernelCall call = sched.algorithm.statements[item.statement];
        for (auto& [hole, e] : call.inputs) e = rename(e, scope);
        call.value = rename(call.value, scope);
        for (auto& o : call.outputs) o = indexed(o, temp_deps.at(o));
        CodeNode st;
        st.kind = CodeKind::Statement;
        st.call = std::move(call);
        block.body.push_back(std::move(st));
        continue;
      }
      const LoopNode& child = node.children[item.loop];
      CodeNode loop;
      loop.kind = CodeKind::Loop;
      loop.index = child.index;
      loop.extent = child.extent;
      std::map<std::string, std::string> inner = scope;
      for (const auto& n : reads(child)) {
        if (temp_deps.count(n) || !sched.spec.variation(n).count(child.index)) continue;
        CodeNode slice;
        slice.kind = CodeKind::Slice;
        slice.source = scope.count(n) ? scope.at(n) : n;
        slice.local = slice.source + "_" + child.index;
        slice.index = child.index;
        inner[n] = slice.local;
        loop.body.push_back(std::move(slice));
      }
      walk(child, loop, inner);
      block.body.push_back(std::move(loop));
    }
  }
};

std::string call_text(const KernelCall& call) {
  std::string outs;
  for (const auto& o : call.outputs) outs += (outs.empty() ? "" : ", ") + o;
  std::string args;
  for (const auto& [hole, e] : call.inputs) args += (args.empty() ? "" : ", ") + hole + "=" + e.str();
  return outs + " := " + call.label() + "(" + args + ")  # cost: " + call.cost.str();
}

void emit_node(const CodeNode& node, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (node.kind) {
    case CodeKind::Block:
      for (const auto& c : node.body) emit_node(c, depth, out);
      break;
    case CodeKind::Loop:
      out += pad + "for " + node.index + " in 1.." + node.extent + ":\n";
      for (const auto& c : node.body) emit_node(c, depth + 1, out);
      break;
    case CodeKind::Statement:
      out += pad + call_text(node.call) + "\n";
      break;
    case CodeKind::Slice:
      out += pad + node.local + " := slice(" + node.source + ", " + node.index + ")\n";
      break;
    case CodeKind::Alloc:
      out += pad + "alloc " + indexed(node.name, node.indices) + " : " + node.shape.rows + " x " +
             node.shape.cols + "\n";
      break;
  }
}

}  // namespace

CodeAST build_ast(const ScheduledAlgorithm& sched) {
  const Algorithm& alg = sched.algorithm;
  Builder b{sched, {}};
  for (std::size_t s = 0; s < alg.statements.size(); ++s)
    for (const auto& o : alg.statements[s].outputs) b.temp_deps[o] = sched.deps[s];

  CodeAST ast;
  ast.name = alg.name;
  ast.output = alg.output;
  CodeNode alloc;
  alloc.kind = CodeKind::Alloc;
  alloc.name = alg.output;
  if (b.temp_deps.count(alg.output)) alloc.indices = b.temp_deps.at(alg.output);
  alloc.shape = alg.ctx.operand(alg.output).shape;
  ast.root.body.push_back(std::move(alloc));
  b.walk(sched.root, ast.root, {});
  return ast;
}

std::string emit(const CodeAST& ast, std::string_view target) {
  if (target != "pseudo") throw Error("unknown code target '" + std::string(target) + "'");
  std::string out = "# algorithm " + ast.name + "\n";
  emit_node(ast.root, 0, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Line {
  int number;
  int indent;
  std::string text;
};

std::string trim(std::string s) {
  auto b = s.find_first_not_of(' ');
  auto e = s.find_last_not_of(' ');
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Splits at top-level occurrences of `sep`.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Reader {
  const Catalog& catalog;
  std::vector<Line> lines;
  std::size_t pos = 0;

  ParseError error(const Line& l, const std::string& why) const { return ParseError(why, l.number, l.indent + 1); }

  // Indexed names such as K[i,j] become placeholders for the expression reader.
  Expr expression(const std::string& text, const Line& l) const {
    static const std::regex ref(R"(([A-Za-z_][A-Za-z0-9_]*)\[([A-Za-z0-9_,]*)\])");
    std::map<std::string, std::string> back;
    std::string plain;
    auto begin = std::sregex_iterator(text.begin(), text.end(), ref);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      std::string ph = "__ref" + std::to_string(back.size());
      back[ph] = it->str();
      plain += text.substr(last, static_cast<std::size_t>(it->position()) - last) + ph;
      last = static_cast<std::size_t>(it->position() + it->length());
    }
    plain += text.substr(last);
    Expr e;
    try {
      e = parse_expression(plain, l.number);
    } catch (const ParseError& err) {
      throw error(l, std::string("bad expression '") + text + "': " + err.what());
    }
    for (const auto& [ph, name] : back) e = e.substitute(ph, Expr::operand(name));
    return e;
  }

  CodeNode statement(const Line& l, const std::string& lhs, std::string rhs) const {
    CodeNode node;
    node.kind = CodeKind::Statement;
    KernelCall& call = node.call;
    auto hash = rhs.find("  # cost: ");
    if (hash != std::string::npos) {
      try {
        call.cost = parse_cost(rhs.substr(hash + 10));
      } catch (const Error& e) {
        throw error(l, e.what());
      }
      rhs = rhs.substr(0, hash);
    }
    rhs = trim(rhs);
    auto open = rhs.find('(');
    if (open == std::string::npos || rhs.back() != ')') throw error(l, "expected kernel(arguments)");
    std::string label = rhs.substr(0, open);
    auto bracket = label.find('[');
    call.kernel = label.substr(0, bracket);
    if (bracket != std::string::npos) {
      if (label.back() != ']') throw error(l, "bad kernel label " + label);
      call.variant = label.substr(bracket + 1, label.size() - bracket - 2);
    }
    std::string args = rhs.substr(open + 1, rhs.size() - open - 2);
    if (!trim(args).empty())
      for (const auto& a : split_top(args, ',')) {
        auto eq = a.find('=');
        if (eq == std::string::npos) throw error(l, "argument without a name: " + a);
        call.inputs[trim(a.substr(0, eq))] = expression(a.substr(eq + 1), l);
      }
    for (const auto& o : split_top(lhs, ',')) call.outputs.push_back(o);

    for (const auto& f : catalog.factorizations())
      if (f.name == call.kernel && call.variant.empty()) {
        call.factorization = f.kind;
        if (!call.inputs.count("A")) throw error(l, "factorization without argument A");
        call.value = call.inputs.at("A");
        return node;
      }
    for (const auto& k : catalog.kernels())
      if (k.label() == label) {
        Expr v = k.pattern;
        for (const auto& [hole, e] : call.inputs) v = v.substitute(hole, e);
        call.value = v;
        return node;
      }
    throw error(l, "unknown kernel " + label);
  }

  std::vector<CodeNode> block(int indent) {
    std::vector<CodeNode> out;
    while (pos < lines.size() && lines[pos].indent >= indent) {
      const Line& l = lines[pos];
      if (l.indent != indent) throw error(l, "unexpected indentation");
      ++pos;
      const std::string& t = l.text;
      if (t.rfind("for ", 0) == 0) {
        static const std::regex loop(R"(for ([A-Za-z_][A-Za-z0-9_]*) in 1\.\.([A-Za-z0-9_]+):)");
        std::smatch m;
        if (!std::regex_match(t, m, loop)) throw error(l, "bad loop header");
        CodeNode node;
        node.kind = CodeKind::Loop;
        node.index = m[1];
        node.extent = m[2];
        if (pos < lines.size() && lines[pos].indent > indent) node.body = block(lines[pos].indent);
        out.push_back(std::move(node));
        continue;
      }
      if (t.rfind("alloc ", 0) == 0) {
        static const std::regex alloc(
            R"(alloc ([A-Za-z_][A-Za-z0-9_]*)(?:\[([A-Za-z0-9_,]*)\])? : ([A-Za-z0-9_]+) x ([A-Za-z0-9_]+))");
        std::smatch m;
        if (!std::regex_match(t, m, alloc)) throw error(l, "bad alloc line");
        CodeNode node;
        node.kind = CodeKind::Alloc;
        node.name = m[1];
        for (const auto& i : split_top(m[2], ','))
          if (!i.empty()) node.indices.insert(i);
        node.shape = {m[3], m[4]};
        out.push_back(std::move(node));
        continue;
      }
      auto assign = t.find(" := ");
      if (assign == std::string::npos) throw error(l, "expected an assignment");
      std::string lhs = t.substr(0, assign);
      std::string rhs = t.substr(assign + 4);
      static const std::regex slice(R"(slice\(([A-Za-z_][A-Za-z0-9_]*), ([A-Za-z_][A-Za-z0-9_]*)\))");
      std::smatch m;
      if (std::regex_match(rhs, m, slice)) {
        CodeNode node;
        node.kind = CodeKind::Slice;
        node.local = lhs;
        node.source = m[1];
        node.index = m[2];
        out.push_back(std::move(node));
        continue;
      }
      out.push_back(statement(l, lhs, rhs));
    }
    return out;
  }
};

}  // namespace

CodeAST parse_pseudo(std::string_view text, const Catalog& catalog) {
  Reader r{catalog, {}, 0};
  CodeAST ast;
  int number = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string raw(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto first = raw.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    std::string body = raw.substr(first);
    if (body[0] == '#') {
      if (body.rfind("# algorithm ", 0) == 0) ast.name = body.substr(12);
      continue;
    }
    r.lines.push_back({number, static_cast<int>(first), body});
  }
  if (!r.lines.empty()) {
    ast.root.body = r.block(r.lines.front().indent);
    if (r.pos != r.lines.size()) throw r.error(r.lines[r.pos], "unexpected indentation");
  }
  for (const auto& n : ast.root.body)
    if (n.kind == CodeKind::Alloc) ast.output = n.name;
  if (ast.output.empty()) throw ParseError("missing alloc line for the result", number, 1);
  return ast;
}

std::map<std::string, DenseMatrix> run(const CodeAST& ast, const SequenceSpec& spec, ExecutionEnv& env) {
  struct View {
    std::string base;
    std::set<std::string> indices;
  };
  std::map<std::string, View> views;
  IndexBinding binding;
  std::set<std::string> result_indices;

  auto resolve = [&](const std::string& name) {
    auto bracket = name.find('[');
    if (bracket != std::string::npos) {
      std::set<std::string> idx;
      for (const auto& i : split_top(name.substr(bracket + 1, name.size() - bracket - 2), ','))
        idx.insert(i);
      return slot_name(name.substr(0, bracket), idx, binding);
    }
    auto v = views.find(name);
    if (v != views.end()) return slot_name(v->second.base, v->second.indices, binding);
    return name;
  };

  std::function<void(const CodeNode&)> exec = [&](const CodeNode& node) {
    switch (node.kind) {
      case CodeKind::Block:
        for (const auto& c : node.body) exec(c);
        break;
      case CodeKind::Loop: {
        std::size_t n = numeric_size(node.extent, env.sizes);
        for (std::size_t v = 1; v <= n; ++v) {
          binding[node.index] = static_cast<int>(v);
          for (const auto& c : node.body) exec(c);
        }
        binding.erase(node.index);
        break;
      }
      case CodeKind::Slice: {
        View view;
        auto src = views.find(node.source);
        if (src != views.end()) view = src->second;
        else view.base = node.source;
        view.indices.insert(node.index);
        views[node.local] = view;
        break;
      }
      case CodeKind::Alloc:
        result_indices = node.indices;
        break;
      case CodeKind::Statement: {
        const KernelCall& call = node.call;
        std::vector<DenseMatrix> out;
        try {
          out = run_kernel(
              call, [&](const std::string& n) -> const DenseMatrix& { return env.at(resolve(n)); }, env.sizes,
              env.flops);
        } catch (const ExecutionError& e) {
          throw ExecutionError(call_text(call) + ": " + e.what());
        }
        if (out.size() != call.outputs.size()) throw ExecutionError(call_text(call) + ": wrong number of results");
        for (std::size_t i = 0; i < out.size(); ++i) env.values[resolve(call.outputs[i])] = std::move(out[i]);
        break;
      }
    }
  };
  exec(ast.root);

  std::set<std::string> all;
  for (const auto& [i, e] : spec.indices) all.insert(i);
  std::map<std::string, DenseMatrix> results;
  for (const auto& point : index_grid(spec, env.sizes))
    results[slot_name(ast.output, all, point)] = env.at(slot_name(ast.output, result_indices, point));
  return results;
}

}  // namespace lacomp
