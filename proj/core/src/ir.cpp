#include "dcert/ir.hpp"

#include <sstream>
#include <utility>

namespace dcert {

const Function* Program::find(std::string_view name) const {
  auto it = index.find(std::string(name));
  if (it == index.end()) return nullptr;
  return &functions[it->second];
}

const Function& Program::require(std::string_view name) const {
  const Function* f = find(name);
  if (!f) throw std::invalid_argument("unknown function: " + std::string(name));
  return *f;
}

bool operator==(const CopyStmt& a, const CopyStmt& b) { return a.dst == b.dst && a.src == b.src; }
bool operator==(const ConstStmt& a, const ConstStmt& b) { return a.dst == b.dst; }
bool operator==(const BinopStmt& a, const BinopStmt& b) {
  return a.dst == b.dst && a.lhs == b.lhs && a.rhs == b.rhs;
}
bool operator==(const CallStmt& a, const CallStmt& b) {
  return a.dst == b.dst && a.callee == b.callee && a.args == b.args;
}
bool operator==(const ReturnStmt& a, const ReturnStmt& b) { return a.value == b.value; }
bool operator==(const IfStmt& a, const IfStmt& b) {
  return a.cond == b.cond && a.then_body == b.then_body && a.else_body == b.else_body;
}
bool operator==(const WhileStmt& a, const WhileStmt& b) {
  return a.cond == b.cond && a.body == b.body;
}
bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
bool operator==(const Function& a, const Function& b) {
  return a.name == b.name && a.params == b.params && a.body == b.body;
}
bool operator==(const Program& a, const Program& b) { return a.functions == b.functions; }

namespace {

enum class Tok {
  Name,
  KwFn,
  KwCall,
  KwReturn,
  KwIf,
  KwElse,
  KwWhile,
  KwConst,
  KwOp,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Eq,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

Tok keyword_kind(std::string_view word) {
  if (word == "fn") return Tok::KwFn;
  if (word == "call") return Tok::KwCall;
  if (word == "return") return Tok::KwReturn;
  if (word == "if") return Tok::KwIf;
  if (word == "else") return Tok::KwElse;
  if (word == "while") return Tok::KwWhile;
  if (word == "const") return Tok::KwConst;
  if (word == "op") return Tok::KwOp;
  return Tok::Name;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    Token tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= src_.size()) {
      tok.kind = Tok::End;
      return tok;
    }
    char c = src_[pos_];
    if (is_name_head(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_name_tail(src_[pos_])) advance();
      tok.text = std::string(src_.substr(start, pos_ - start));
      tok.kind = keyword_kind(tok.text);
      return tok;
    }
    switch (c) {
      case '(': tok.kind = Tok::LParen; break;
      case ')': tok.kind = Tok::RParen; break;
      case '{': tok.kind = Tok::LBrace; break;
      case '}': tok.kind = Tok::RBrace; break;
      case ',': tok.kind = Tok::Comma; break;
      case ';': tok.kind = Tok::Semi; break;
      case '=': tok.kind = Tok::Eq; break;
      default:
        throw ParseError(Diag::SyntaxError, line_, col_,
                         std::string("unexpected character '") + c + "'");
    }
    tok.text = std::string(1, c);
    advance();
    return tok;
  }

 private:
  static bool is_name_head(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  }
  static bool is_name_tail(char c) {
    return is_name_head(c) || (c >= '0' && c <= '9') || c == '.';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct CallSite {
  std::string callee;
  std::size_t argc;
  int line;
  int col;
};

struct ReadRef {
  std::string name;
  int line;
  int col;
};

struct BodyRecord {
  std::vector<CallSite> calls;
  std::vector<ReadRef> reads;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  Program parse() {
    Program program;
    std::vector<BodyRecord> records;
    while (cur_.kind != Tok::End) {
      expect(Tok::KwFn, "expected 'fn'");
      Token name = expect(Tok::Name, "expected function name");
      if (program.index.count(name.text)) {
        throw ParseError(Diag::DuplicateFunction, name.line, name.col,
                         "function '" + name.text + "' is defined twice");
      }
      Function fn;
      fn.name = name.text;
      expect(Tok::LParen, "expected '('");
      if (cur_.kind == Tok::Name) {
        fn.params.push_back(take_name().text);
        while (cur_.kind == Tok::Comma) {
          bump();
          Token p = expect(Tok::Name, "expected parameter name");
          for (const std::string& existing : fn.params) {
            if (existing == p.text) {
              throw ParseError(Diag::DuplicateParam, p.line, p.col,
                               "parameter '" + p.text + "' repeated");
            }
          }
          fn.params.push_back(p.text);
        }
      }
      expect(Tok::RParen, "expected ')'");
      BodyRecord record;
      fn.body = parse_block(record);
      program.index.emplace(fn.name, program.functions.size());
      program.functions.push_back(std::move(fn));
      records.push_back(std::move(record));
    }
    check_arity(program, records);
    check_scope(program, records);
    return program;
  }

 private:
  void bump() { cur_ = lex_.next(); }

  Token take_name() {
    Token t = cur_;
    bump();
    return t;
  }

  Token expect(Tok kind, const char* message) {
    if (cur_.kind != kind) {
      throw ParseError(Diag::SyntaxError, cur_.line, cur_.col, message);
    }
    Token t = cur_;
    bump();
    return t;
  }

  StmtList parse_block(BodyRecord& record) {
    expect(Tok::LBrace, "expected '{'");
    StmtList body;
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::End) {
        throw ParseError(Diag::SyntaxError, cur_.line, cur_.col, "unterminated block");
      }
      body.push_back(parse_stmt(record));
    }
    bump();  // consume '}'
    return body;
  }

  std::vector<std::string> parse_args(BodyRecord& record) {
    expect(Tok::LParen, "expected '('");
    std::vector<std::string> args;
    if (cur_.kind == Tok::Name) {
      record.reads.push_back({cur_.text, cur_.line, cur_.col});
      args.push_back(take_name().text);
      while (cur_.kind == Tok::Comma) {
        bump();
        Token a = expect(Tok::Name, "expected argument name");
        record.reads.push_back({a.text, a.line, a.col});
        args.push_back(a.text);
      }
    }
    expect(Tok::RParen, "expected ')'");
    return args;
  }

  CallStmt parse_call(std::optional<std::string> dst, BodyRecord& record) {
    Token callee = expect(Tok::Name, "expected callee name");
    CallStmt call;
    call.dst = std::move(dst);
    call.callee = callee.text;
    call.args = parse_args(record);
    record.calls.push_back({call.callee, call.args.size(), callee.line, callee.col});
    return call;
  }

  Stmt parse_stmt(BodyRecord& record) {
    switch (cur_.kind) {
      case Tok::KwCall: {
        bump();
        CallStmt call = parse_call(std::nullopt, record);
        expect(Tok::Semi, "expected ';'");
        return Stmt{std::move(call)};
      }
      case Tok::KwReturn: {
        bump();
        ReturnStmt ret;
        if (cur_.kind == Tok::Name) {
          record.reads.push_back({cur_.text, cur_.line, cur_.col});
          ret.value = take_name().text;
        }
        expect(Tok::Semi, "expected ';'");
        return Stmt{std::move(ret)};
      }
      case Tok::KwIf: {
        bump();
        expect(Tok::LParen, "expected '('");
        Token cond = expect(Tok::Name, "expected condition variable");
        record.reads.push_back({cond.text, cond.line, cond.col});
        expect(Tok::RParen, "expected ')'");
        IfStmt stmt;
        stmt.cond = cond.text;
        stmt.then_body = parse_block(record);
        if (cur_.kind == Tok::KwElse) {
          bump();
          stmt.else_body = parse_block(record);
        }
        return Stmt{std::move(stmt)};
      }
      case Tok::KwWhile: {
        bump();
        expect(Tok::LParen, "expected '('");
        Token cond = expect(Tok::Name, "expected condition variable");
        record.reads.push_back({cond.text, cond.line, cond.col});
        expect(Tok::RParen, "expected ')'");
        WhileStmt stmt;
        stmt.cond = cond.text;
        stmt.body = parse_block(record);
        return Stmt{std::move(stmt)};
      }
      case Tok::Name: {
        Token dst = take_name();
        expect(Tok::Eq, "expected '='");
        if (cur_.kind == Tok::KwConst) {
          bump();
          expect(Tok::Semi, "expected ';'");
          return Stmt{ConstStmt{dst.text}};
        }
        if (cur_.kind == Tok::KwCall) {
          bump();
          CallStmt call = parse_call(dst.text, record);
          expect(Tok::Semi, "expected ';'");
          return Stmt{std::move(call)};
        }
        Token first = expect(Tok::Name, "expected expression");
        record.reads.push_back({first.text, first.line, first.col});
        if (cur_.kind == Tok::KwOp) {
          bump();
          Token second = expect(Tok::Name, "expected right operand");
          record.reads.push_back({second.text, second.line, second.col});
          expect(Tok::Semi, "expected ';'");
          return Stmt{BinopStmt{dst.text, first.text, second.text}};
        }
        expect(Tok::Semi, "expected ';'");
        return Stmt{CopyStmt{dst.text, first.text}};
      }
      default:
        throw ParseError(Diag::SyntaxError, cur_.line, cur_.col, "expected statement");
    }
  }

  static void check_arity(const Program& program, const std::vector<BodyRecord>& records) {
    for (const BodyRecord& record : records) {
      for (const CallSite& site : record.calls) {
        const Function* callee = program.find(site.callee);
        if (callee && callee->params.size() != site.argc) {
          throw ParseError(Diag::ArityMismatch, site.line, site.col,
                           "call to '" + site.callee + "' passes " + std::to_string(site.argc) +
                               " arguments, declared with " +
                               std::to_string(callee->params.size()));
        }
      }
    }
  }

  static void check_scope(const Program& program, const std::vector<BodyRecord>& records) {
    for (std::size_t i = 0; i < program.functions.size(); ++i) {
      const Function& fn = program.functions[i];
      std::set<std::string> known = assigned_variables(fn.body);
      known.insert(fn.params.begin(), fn.params.end());
      for (const ReadRef& read : records[i].reads) {
        if (!known.count(read.name)) {
          throw ParseError(Diag::UndeclaredVariable, read.line, read.col,
                           "undeclared variable read '" + read.name + "' in '" + fn.name + "'");
        }
      }
    }
  }

  Lexer lex_;
  Token cur_;
};

void collect_assigned(const StmtList& body, std::set<std::string>& out) {
  for (const Stmt& stmt : body) {
    if (const auto* s = stmt.as<CopyStmt>()) {
      out.insert(s->dst);
    } else if (const auto* s = stmt.as<ConstStmt>()) {
      out.insert(s->dst);
    } else if (const auto* s = stmt.as<BinopStmt>()) {
      out.insert(s->dst);
    } else if (const auto* s = stmt.as<CallStmt>()) {
      if (s->dst) out.insert(*s->dst);
    } else if (const auto* s = stmt.as<IfStmt>()) {
      collect_assigned(s->then_body, out);
      collect_assigned(s->else_body, out);
    } else if (const auto* s = stmt.as<WhileStmt>()) {
      collect_assigned(s->body, out);
    }
  }
}

void collect_callees(const StmtList& body, std::set<std::string>& out) {
  for (const Stmt& stmt : body) {
    if (const auto* s = stmt.as<CallStmt>()) {
      out.insert(s->callee);
    } else if (const auto* s = stmt.as<IfStmt>()) {
      collect_callees(s->then_body, out);
      collect_callees(s->else_body, out);
    } else if (const auto* s = stmt.as<WhileStmt>()) {
      collect_callees(s->body, out);
    }
  }
}

void print_call(std::ostream& os, const CallStmt& call) {
  os << "call " << call.callee << "(";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) os << ", ";
    os << call.args[i];
  }
  os << ")";
}

void print_stmts(std::ostream& os, const StmtList& body, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const Stmt& stmt : body) {
    if (const auto* s = stmt.as<CopyStmt>()) {
      os << pad << s->dst << " = " << s->src << ";\n";
    } else if (const auto* s = stmt.as<ConstStmt>()) {
      os << pad << s->dst << " = const;\n";
    } else if (const auto* s = stmt.as<BinopStmt>()) {
      os << pad << s->dst << " = " << s->lhs << " op " << s->rhs << ";\n";
    } else if (const auto* s = stmt.as<CallStmt>()) {
      os << pad;
      if (s->dst) os << *s->dst << " = ";
      print_call(os, *s);
      os << ";\n";
    } else if (const auto* s = stmt.as<ReturnStmt>()) {
      os << pad << "return";
      if (s->value) os << " " << *s->value;
      os << ";\n";
    } else if (const auto* s = stmt.as<IfStmt>()) {
      os << pad << "if (" << s->cond << ") {\n";
      print_stmts(os, s->then_body, indent + 1);
      os << pad << "}";
      if (!s->else_body.empty()) {
        os << " else {\n";
        print_stmts(os, s->else_body, indent + 1);
        os << pad << "}";
      }
      os << "\n";
    } else if (const auto* s = stmt.as<WhileStmt>()) {
      os << pad << "while (" << s->cond << ") {\n";
      print_stmts(os, s->body, indent + 1);
      os << pad << "}\n";
    }
  }
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

std::string pretty_print(const Program& program) {
  std::ostringstream os;
  bool first = true;
  for (const Function& fn : program.functions) {
    if (!first) os << "\n";
    first = false;
    os << "fn " << fn.name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) os << ", ";
      os << fn.params[i];
    }
    os << ") {\n";
    print_stmts(os, fn.body, 1);
    os << "}\n";
  }
  return os.str();
}

std::set<std::string> callees_of(const Program& program, std::string_view function) {
  const Function& fn = program.require(function);
  std::set<std::string> out;
  collect_callees(fn.body, out);
  return out;
}

std::set<std::string> roots_of(const Program& program) {
  std::set<std::string> called;
  for (const Function& fn : program.functions) {
    std::set<std::string> callees;
    collect_callees(fn.body, callees);
    for (const std::string& callee : callees) {
      if (callee != fn.name && program.find(callee)) called.insert(callee);
    }
  }
  std::set<std::string> roots;
  for (const Function& fn : program.functions) {
    if (!called.count(fn.name)) roots.insert(fn.name);
  }
  return roots;
}

std::set<std::string> assigned_variables(const StmtList& body) {
  std::set<std::string> out;
  collect_assigned(body, out);
  return out;
}

}  // namespace dcert
