#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dcert/diag.hpp"

namespace dcert {

struct Stmt;
using StmtList = std::vector<Stmt>;

struct CopyStmt {
  std::string dst;
  std::string src;
};

struct ConstStmt {
  std::string dst;
};

struct BinopStmt {
  std::string dst;
  std::string lhs;
  std::string rhs;
};

struct CallStmt {
  std::optional<std::string> dst;  // absent for statement-position calls
  std::string callee;
  std::vector<std::string> args;
};

struct ReturnStmt {
  std::optional<std::string> value;
};

struct IfStmt {
  std::string cond;  // read for scoping; induces no flow
  StmtList then_body;
  StmtList else_body;
};

struct WhileStmt {
  std::string cond;
  StmtList body;
};

/// One statement of the procedural IR. First-order, untyped, value semantics:
/// no fields, no aliasing, no indirect calls.
struct Stmt {
  std::variant<CopyStmt, ConstStmt, BinopStmt, CallStmt, ReturnStmt, IfStmt, WhileStmt> node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct Function {
  std::string name;
  std::vector<std::string> params;  // pairwise distinct
  StmtList body;
};

/// A parsed program: functions in source order, unique names.
struct Program {
  std::vector<Function> functions;
  std::map<std::string, std::size_t> index;  // name -> position in `functions`

  const Function* find(std::string_view name) const;
  /// Lookup that throws std::invalid_argument for unknown names.
  const Function& require(std::string_view name) const;
};

bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const CopyStmt& a, const CopyStmt& b);
bool operator==(const ConstStmt& a, const ConstStmt& b);
bool operator==(const BinopStmt& a, const BinopStmt& b);
bool operator==(const CallStmt& a, const CallStmt& b);
bool operator==(const ReturnStmt& a, const ReturnStmt& b);
bool operator==(const IfStmt& a, const IfStmt& b);
bool operator==(const WhileStmt& a, const WhileStmt& b);
bool operator==(const Function& a, const Function& b);
bool operator==(const Program& a, const Program& b);

/// Parses `.dct` program text. Rejects anything outside the grammar with a
/// ParseError carrying a distinct Diag code: syntax errors, duplicate
/// function or parameter names, call-arity mismatches against defined
/// functions, and reads of variables never assigned in the body (the scope
/// check is flow-insensitive, not a dominance check).
Program parse_program(std::string_view text);

/// Canonical textual form; parse_program(pretty_print(p)) reproduces p.
std::string pretty_print(const Program& program);

/// Names invoked by `call` anywhere in f's body, nested blocks included.
std::set<std::string> callees_of(const Program& program, std::string_view function);

/// Functions not invoked by any *other* defined function. A function whose
/// only caller is itself still counts as a root.
std::set<std::string> roots_of(const Program& program);

/// Assignment targets anywhere in a statement list, nested blocks included.
std::set<std::string> assigned_variables(const StmtList& body);

}  // namespace dcert
