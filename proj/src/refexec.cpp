#include "lacomp/refexec.hpp"

#include <random>

namespace lacomp {

std::string slot_name(const std::string& name, const std::set<std::string>& deps,
                      const IndexBinding& at) {
  if (deps.empty()) return name;
  std::string s = name + "[";
  bool first = true;
  for (const auto& d : deps) {
    auto it = at.find(d);
    if (it == at.end()) throw ExecutionError("index '" + d + "' of " + name + " is not bound");
    s += (first ? "" : ",") + d + "=" + std::to_string(it->second);
    first = false;
  }
  return s + "]";
}

std::size_t numeric_size(const std::string& symbol, const std::map<std::string, std::int64_t>& sizes) {
  if (symbol == "1") return 1;
  auto it = sizes.find(symbol);
  if (it == sizes.end()) throw ExecutionError("no numeric value for size '" + symbol + "'");
  if (it->second < 1) throw ExecutionError("size '" + symbol + "' must be positive");
  return static_cast<std::size_t>(it->second);
}

std::vector<IndexBinding> index_grid(const SequenceSpec& spec,
                                     const std::map<std::string, std::int64_t>& sizes) {
  std::vector<IndexBinding> out{{}};
  for (const auto& [index, extent] : spec.indices) {
    std::size_t n = numeric_size(extent, sizes);
    std::vector<IndexBinding> next;
    for (const auto& b : out)
      for (std::size_t v = 1; v <= n; ++v) {
        IndexBinding e = b;
        e[index] = static_cast<int>(v);
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

const DenseMatrix& ExecutionEnv::at(const std::string& slot) const {
  auto it = values.find(slot);
  if (it == values.end()) throw ExecutionError("no value bound to '" + slot + "'");
  return it->second;
}

namespace {

using Lookup = std::function<const DenseMatrix&(const std::string&)>;

// A matrix, or a scaled identity whose size comes from its context.
struct Value {
  bool identity = false;
  double scale = 1.0;
  DenseMatrix m;
};

bool is_scalar(const DenseMatrix& m) { return m.rows() == 1 && m.cols() == 1; }

Value multiply(const Value& a, const Value& b) {
  if (a.identity && b.identity) return {true, a.scale * b.scale, {}};
  if (a.identity) {
    if (is_scalar(b.m)) return {true, a.scale * b.m(0, 0), {}};
    return {false, 1.0, a.scale * b.m};
  }
  if (b.identity) {
    if (is_scalar(a.m)) return {true, b.scale * a.m(0, 0), {}};
    return {false, 1.0, b.scale * a.m};
  }
  if (a.m.cols() == b.m.rows()) return {false, 1.0, a.m * b.m};
  if (is_scalar(a.m)) return {false, 1.0, a.m(0, 0) * b.m};
  if (is_scalar(b.m)) return {false, 1.0, b.m(0, 0) * a.m};
  throw ExecutionError("shape mismatch in product");
}

Value eval(const Expr& e, const Lookup& lookup) {
  switch (e.kind()) {
    case NodeKind::Operand: return {false, 1.0, lookup(e.name())};
    case NodeKind::Scalar: return {false, 1.0, DenseMatrix(1, 1, boost::rational_cast<double>(e.value()))};
    case NodeKind::Identity: return {true, 1.0, {}};
    case NodeKind::Plus: {
      double id = 0;
      bool any_matrix = false;
      DenseMatrix sum;
      for (const auto& c : e.children()) {
        Value v = eval(c, lookup);
        if (v.identity) {
          id += v.scale;
        } else if (!any_matrix) {
          sum = v.m;
          any_matrix = true;
        } else {
          sum = sum + v.m;
        }
      }
      if (!any_matrix) return {true, id, {}};
      if (id != 0) {
        if (sum.rows() != sum.cols()) throw ExecutionError("identity added to a non-square matrix");
        for (std::size_t i = 0; i < sum.rows(); ++i) sum(i, i) += id;
      }
      return {false, 1.0, sum};
    }
    case NodeKind::Times: {
      Value acc = eval(e.children()[0], lookup);
      for (std::size_t i = 1; i < e.children().size(); ++i) acc = multiply(acc, eval(e.children()[i], lookup));
      return acc;
    }
    case NodeKind::Negate: {
      Value v = eval(e.child(), lookup);
      if (v.identity) return {true, -v.scale, {}};
      return {false, 1.0, -1.0 * v.m};
    }
    case NodeKind::Inverse: {
      Value v = eval(e.child(), lookup);
      if (v.identity) {
        if (v.scale == 0) throw ExecutionError("inverse of a zero identity");
        return {true, 1.0 / v.scale, {}};
      }
      return {false, 1.0, dense::inverse(v.m)};
    }
    case NodeKind::Transpose: {
      Value v = eval(e.child(), lookup);
      if (v.identity) return v;
      return {false, 1.0, v.m.transpose()};
    }
  }
  throw ExecutionError("unknown expression node");
}

}  // namespace

DenseMatrix evaluate(const Expr& e, const Lookup& lookup, std::size_t identity_size) {
  Value v = eval(e, lookup);
  if (v.identity && identity_size > 0) return v.scale * DenseMatrix::identity(identity_size);
  if (v.identity) throw ExecutionError("identity without a size: " + e.str());
  return v.m;
}

DenseMatrix oracle(const Equation& eq, const ExecutionEnv& env) {
  return evaluate(eq.rhs, [&](const std::string& n) -> const DenseMatrix& { return env.at(n); });
}

std::map<std::string, DenseMatrix> oracle(const Equation& eq, const SequenceSpec& spec,
                                          const ExecutionEnv& env) {
  std::set<std::string> all;
  for (const auto& [i, e] : spec.indices) all.insert(i);
  std::map<std::string, DenseMatrix> out;
  for (const auto& point : index_grid(spec, env.sizes)) {
    out[slot_name(eq.output, all, point)] = evaluate(eq.rhs, [&](const std::string& n) -> const DenseMatrix& {
      return env.at(slot_name(n, spec.variation(n), point));
    });
  }
  return out;
}

std::vector<DenseMatrix> run_kernel(const KernelCall& call, const Lookup& lookup,
                                    const std::map<std::string, std::int64_t>& sizes, FlopCounter& flops) {
  const std::string& k = call.kernel;
  auto in = [&](const char* hole) -> const Expr& {
    auto it = call.inputs.find(hole);
    if (it == call.inputs.end()) throw ExecutionError(k + ": missing argument " + hole);
    return it->second;
  };
  auto mat = [&](const char* hole) { return evaluate(in(hole), lookup); };
  auto scalar = [&](const char* hole) {
    DenseMatrix m = mat(hole);
    if (!is_scalar(m)) throw ExecutionError(k + ": argument " + hole + " is not a scalar");
    return m(0, 0);
  };

  if (call.factorization) {
    DenseMatrix a = mat("A");
    switch (*call.factorization) {
      case Factorization::Cholesky: return {dense::cholesky(a, &flops, k)};
      case Factorization::QR: {
        auto qr = dense::householder_qr(a, &flops, k);
        return {qr.q, qr.r};
      }
      case Factorization::Eig: {
        auto e = dense::symmetric_eig(a, &flops, k);
        return {e.z, e.w};
      }
      case Factorization::SVD: {
        auto s = dense::svd(a, &flops, k);
        return {s.u, s.s, s.v};
      }
    }
  }

  const std::string& v = call.variant;
  if (k == "scal-add") {
    double a = scalar("a");
    double b = scalar("b");
    DenseMatrix m = mat("A");
    if (m.rows() != m.cols()) throw ExecutionError("scal-add on a non-square matrix");
    std::size_t n = m.rows();
    if (v == "diag") {
      DenseMatrix d(n, n);
      for (std::size_t i = 0; i < n; ++i) d(i, i) = a * m(i, i) + b;
      flops.add(k, 2.0 * n);
      return {d};
    }
    DenseMatrix d = a * m;
    for (std::size_t i = 0; i < n; ++i) d(i, i) += b;
    flops.add(k, static_cast<double>(n) * n + n);
    return {d};
  }
  if (k == "axpy") {
    DenseMatrix r = scalar("a") * mat("A") + scalar("b") * mat("B");
    flops.add(k, 3.0 * r.rows() * r.cols());
    return {r};
  }
  if (k == "scal") {
    if (v.empty()) {
      DenseMatrix r = scalar("a") * mat("A");
      flops.add(k, static_cast<double>(r.rows()) * r.cols());
      return {r};
    }
    DenseMatrix d = mat("D");
    DenseMatrix b = mat("B");
    bool left = v == "left" || v == "left-inv";
    bool invert = v == "left-inv" || v == "right-inv";
    if (d.rows() != (left ? b.rows() : b.cols())) throw ExecutionError(k + ": shape mismatch");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) {
        double s = left ? d(i, i) : d(j, j);
        if (invert && s == 0) throw ExecutionError(k + ": zero on the diagonal");
        b(i, j) = invert ? b(i, j) / s : b(i, j) * s;
      }
    flops.add(k, static_cast<double>(b.rows()) * b.cols());
    return {b};
  }
  if (k == "trsv") return {dense::triangular_solve(mat("T"), mat("x"), true, &flops, k)};
  if (k == "trsm") return {dense::triangular_solve(mat("T"), mat("B"), v != "right", &flops, k)};
  if (k == "syrk") return {dense::syrk(mat("A"), v != "nt", &flops, k)};
  if (k == "dot") return {dense::gemm(mat("x").transpose(), mat("y"), &flops, k)};
  if (k == "gemv") {
    if (v == "t") return {dense::gemm(mat("x").transpose(), mat("A"), &flops, k)};
    return {dense::gemm(mat("A"), mat("x"), &flops, k)};
  }
  if (k == "gemm") return {dense::gemm(mat("A"), mat("B"), &flops, k)};

  // Kernels from a user catalog: literal evaluation, modelled cost.
  DenseMatrix r = evaluate(call.value, lookup);
  flops.add(k, boost::rational_cast<double>(call.cost.evaluate(sizes)));
  return {r};
}

namespace {

std::string describe(const KernelCall& call) { return statement_text(call) + " (" + call.label() + ")"; }

void run_statement(const KernelCall& call, const Lookup& lookup, ExecutionEnv& env,
                   const std::function<std::string(const std::string&)>& slot) {
  std::vector<DenseMatrix> out;
  try {
    out = run_kernel(call, lookup, env.sizes, env.flops);
  } catch (const ExecutionError& e) {
    throw ExecutionError(describe(call) + ": " + e.what());
  }
  if (out.size() != call.outputs.size()) throw ExecutionError(describe(call) + ": wrong number of results");
  for (std::size_t i = 0; i < out.size(); ++i) env.values[slot(call.outputs[i])] = std::move(out[i]);
}

}  // namespace

DenseMatrix execute(const Algorithm& alg, ExecutionEnv& env) {
  Lookup lookup = [&](const std::string& n) -> const DenseMatrix& { return env.at(n); };
  for (const auto& call : alg.statements)
    run_statement(call, lookup, env, [](const std::string& n) { return n; });
  return env.at(alg.output);
}

std::map<std::string, DenseMatrix> execute(const ScheduledAlgorithm& sched, ExecutionEnv& env) {
  const Algorithm& alg = sched.algorithm;
  std::map<std::string, std::set<std::string>> deps_of;
  for (std::size_t s = 0; s < alg.statements.size(); ++s)
    for (const auto& o : alg.statements[s].outputs) deps_of[o] = sched.deps[s];
  auto deps = [&](const std::string& n) {
    auto it = deps_of.find(n);
    return it == deps_of.end() ? sched.spec.variation(n) : it->second;
  };

  IndexBinding binding;
  std::function<void(const LoopNode&)> walk = [&](const LoopNode& node) {
    for (const auto& item : node.body) {
      if (item.is_loop) {
        const LoopNode& child = node.children[item.loop];
        std::size_t n = numeric_size(child.extent, env.sizes);
        for (std::size_t v = 1; v <= n; ++v) {
          binding[child.index] = static_cast<int>(v);
          walk(child);
        }
        binding.erase(child.index);
        continue;
      }
      const KernelCall& call = alg.statements[item.statement];
      Lookup lookup = [&](const std::string& n) -> const DenseMatrix& {
        return env.at(slot_name(n, deps(n), binding));
      };
      run_statement(call, lookup, env, [&](const std::string& n) { return slot_name(n, deps(n), binding); });
    }
  };
  walk(sched.root);

  std::set<std::string> all;
  for (const auto& [i, e] : sched.spec.indices) all.insert(i);
  std::map<std::string, DenseMatrix> out;
  for (const auto& point : index_grid(sched.spec, env.sizes))
    out[slot_name(alg.output, all, point)] = env.at(slot_name(alg.output, deps(alg.output), point));
  return out;
}

DenseMatrix random_matrix(const PropertySet& p, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&](std::size_t r, std::size_t c) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = normal(rng);
    return m;
  };
  if (rows == 1 && cols == 1 && !has(p, Property::Matrix) && !has(p, Property::Vector)) {
    return DenseMatrix(1, 1, std::uniform_real_distribution<double>(0.05, 0.95)(rng));
  }
  if (has(p, Property::Identity)) return DenseMatrix::identity(rows);
  if (has(p, Property::OrthogonalSquare) || has(p, Property::OrthonormalColumns))
    return dense::householder_qr(gaussian(rows, cols)).q;
  if (has(p, Property::Diagonal)) {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    DenseMatrix d(rows, cols);
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) d(i, i) = u(rng);
    return d;
  }
  if (has(p, Property::SPD) || has(p, Property::Symmetric)) {
    DenseMatrix a = gaussian(rows, rows);
    DenseMatrix s = a * a.transpose();
    s = (1.0 / dense::spectral_norm(s)) * s;
    for (std::size_t i = 0; i < rows; ++i) s(i, i) += 1e-3;
    return s;
  }
  bool lower = has(p, Property::LowerTriangular);
  bool upper = has(p, Property::UpperTriangular);
  DenseMatrix m = gaussian(rows, cols);
  if (lower || upper) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        if ((lower && j > i) || (upper && j < i)) m(i, j) = 0;
        if (i == j) m(i, j) = 1.0 + std::abs(m(i, j));
      }
  }
  return m;
}

ExecutionEnv random_instance(const PropertyContext& ctx, const SequenceSpec& spec,
                             const std::map<std::string, std::int64_t>& sizes, std::uint64_t seed) {
  ExecutionEnv env;
  env.sizes = sizes;
  std::mt19937_64 master(seed);
  for (const auto& [name, info] : ctx.operands()) {
    if (has(info.properties, Property::OutputOperand)) continue;
    std::size_t r = numeric_size(info.shape.rows, sizes);
    std::size_t c = numeric_size(info.shape.cols, sizes);
    std::set<std::string> var = spec.variation(name);
    SequenceSpec sub = spec.restricted(var);
    for (const auto& point : index_grid(sub, sizes))
      env.values[slot_name(name, var, point)] = random_matrix(info.properties, r, c, master());
  }
  return env;
}

}  // namespace lacomp
