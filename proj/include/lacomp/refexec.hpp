#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lacomp/dense.hpp"
#include "lacomp/derivation.hpp"
#include "lacomp/seqloop.hpp"

namespace lacomp {

/// Values of one loop iteration: index -> 1-based value.
using IndexBinding = std::map<std::string, int>;

/// Storage key of `name` for the indices in `deps`: "X", "X[i=2]", "b[i=1,j=3]".
std::string slot_name(const std::string& name, const std::set<std::string>& deps,
                      const IndexBinding& at);

/// Every binding of the indices of `spec` (first declared index outermost).
std::vector<IndexBinding> index_grid(const SequenceSpec& spec,
                                     const std::map<std::string, std::int64_t>& sizes);

/// Named matrices and per-kernel FLOP counters of one run.
struct ExecutionEnv {
  std::map<std::string, DenseMatrix> values;  // slot -> matrix
  std::map<std::string, std::int64_t> sizes;  // size and extent symbols
  FlopCounter flops;

  const DenseMatrix& at(const std::string& slot) const;
};

/// Literal evaluation: every inverse by Gauss-Jordan with partial pivoting.
/// `lookup` resolves operand names; identity takes the size of its context,
/// or `identity_size` when the whole expression is a scaled identity.
DenseMatrix evaluate(const Expr& e, const std::function<const DenseMatrix&(const std::string&)>& lookup,
                     std::size_t identity_size = 0);

/// The root equation evaluated literally on unsliced inputs.
DenseMatrix oracle(const Equation& eq, const ExecutionEnv& env);

/// The oracle for every point of the grid of `spec`, keyed by the output slot.
std::map<std::string, DenseMatrix> oracle(const Equation& eq, const SequenceSpec& spec,
                                          const ExecutionEnv& env);

/// Runs one kernel call; results are written to `outputs` in call order.
std::vector<DenseMatrix> run_kernel(const KernelCall& call,
                                    const std::function<const DenseMatrix&(const std::string&)>& lookup,
                                    const std::map<std::string, std::int64_t>& sizes, FlopCounter& flops);

/// Executes the statements in order on unsliced inputs; returns the output.
DenseMatrix execute(const Algorithm& alg, ExecutionEnv& env);

/// Executes the loop nest; inputs live in slots sliced by their variation.
/// Returns the output for every grid point, keyed as the oracle's.
std::map<std::string, DenseMatrix> execute(const ScheduledAlgorithm& sched, ExecutionEnv& env);

/// Random inputs conforming to declared properties: SPD and symmetric as
/// AA'/||AA'||_2 + 1e-3 I, scalars in (0.05, 0.95), triangular with a
/// dominant diagonal, orthogonal from a QR. Sliced inputs get one value per
/// index point.
ExecutionEnv random_instance(const PropertyContext& ctx, const SequenceSpec& spec,
                             const std::map<std::string, std::int64_t>& sizes, std::uint64_t seed);

/// One random matrix with the given properties.
DenseMatrix random_matrix(const PropertySet& props, std::size_t rows, std::size_t cols,
                          std::uint64_t seed);

/// Numeric size of a shape symbol ("1" is 1).
std::size_t numeric_size(const std::string& symbol, const std::map<std::string, std::int64_t>& sizes);

}  // namespace lacomp
