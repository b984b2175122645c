#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcert {

/// Diagnostic codes for rejected input. Each rejection path in the program
/// parser, the policy parser and the certificate decoder has its own code so
/// callers can distinguish them without string matching.
enum class Diag {
  // program text
  SyntaxError,
  DuplicateFunction,
  DuplicateParam,
  ArityMismatch,
  UndeclaredVariable,
  // policy text
  PolicySyntaxError,
  DuplicateLabel,
  DuplicateApi,
  UndeclaredLabel,
  // certificate bytes
  BadHeader,
  NonCanonical,
  MalformedNode,
  DuplicateFunctionBlock,
};

std::string_view diag_name(Diag code);

/// Rejection of textual input (program, policy or certificate). Carries the
/// 1-based source position of the offending token or line.
class ParseError : public std::runtime_error {
 public:
  ParseError(Diag code, int line, int column, const std::string& message);

  Diag code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Diag code_;
  int line_;
  int column_;
};

/// NAME token of the surface grammars: [A-Za-z_][A-Za-z0-9_.]*
bool is_valid_name(std::string_view text);

}  // namespace dcert
