#include "dcert/diag.hpp"

namespace dcert {

std::string_view diag_name(Diag code) {
  switch (code) {
    case Diag::SyntaxError: return "syntax-error";
    case Diag::DuplicateFunction: return "duplicate-function";
    case Diag::DuplicateParam: return "duplicate-param";
    case Diag::ArityMismatch: return "arity-mismatch";
    case Diag::UndeclaredVariable: return "undeclared-variable";
    case Diag::PolicySyntaxError: return "policy-syntax-error";
    case Diag::DuplicateLabel: return "duplicate-label";
    case Diag::DuplicateApi: return "duplicate-api";
    case Diag::UndeclaredLabel: return "undeclared-label";
    case Diag::BadHeader: return "bad-header";
    case Diag::NonCanonical: return "non-canonical";
    case Diag::MalformedNode: return "malformed-node";
    case Diag::DuplicateFunctionBlock: return "duplicate-function-block";
  }
  return "unknown";
}

namespace {

std::string format_message(Diag code, int line, int column, const std::string& message) {
  std::string out;
  out += std::to_string(line);
  out += ':';
  out += std::to_string(column);
  out += ": ";
  out += diag_name(code);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

ParseError::ParseError(Diag code, int line, int column, const std::string& message)
    : std::runtime_error(format_message(code, line, column, message)),
      code_(code),
      line_(line),
      column_(column) {}

bool is_valid_name(std::string_view text) {
  if (text.empty()) return false;
  auto head = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '.'; };
  if (!head(text.front())) return false;
  for (char c : text.substr(1)) {
    if (!tail(c)) return false;
  }
  return true;
}

}  // namespace dcert
