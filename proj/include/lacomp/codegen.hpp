#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lacomp/kernels.hpp"
#include "lacomp/refexec.hpp"
#include "lacomp/seqloop.hpp"

namespace lacomp {

enum class CodeKind : std::uint8_t { Block, Loop, Statement, Slice, Alloc };

struct CodeNode {
  CodeKind kind = CodeKind::Block;
  std::vector<CodeNode> body;      // Block, Loop
  std::string index;               // Loop, Slice
  std::string extent;              // Loop
  KernelCall call;                 // Statement; operands already renamed
  std::string local;               // Slice: local := slice(source, index)
  std::string source;              // Slice
  std::string name;                // Alloc
  std::set<std::string> indices;   // Alloc: indices of the result array
  Shape shape;                     // Alloc
};

/// Mirrors the loop nest of a scheduled algorithm. Sliced operands are
/// named `X_i`; temporaries kept per index are written `K[i]`.
struct CodeAST {
  std::string name;
  std::string output;
  CodeNode root;  // Block
};

CodeAST build_ast(const ScheduledAlgorithm& sched);

/// Source text for `target`; only "pseudo" is defined. Throws Error otherwise.
std::string emit(const CodeAST& ast, std::string_view target = "pseudo");

/// Reads emitted pseudo-code back. Kernel values are rebuilt from the
/// catalog patterns. Throws ParseError with the line number.
CodeAST parse_pseudo(std::string_view text, const Catalog& catalog = Catalog::defaults());

/// Interprets the AST on sliced inputs, as execute() on a schedule does.
/// Returns the output for every point of the grid of `spec`.
std::map<std::string, DenseMatrix> run(const CodeAST& ast, const SequenceSpec& spec, ExecutionEnv& env);

}  // namespace lacomp
