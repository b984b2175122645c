#include "dcert/policy.hpp"

#include <vector>

namespace dcert {

namespace {

struct LineToken {
  enum Kind { Word, Colon, Comma, Arrow } kind;
  std::string text;
  int col;
};

std::vector<LineToken> tokenize_line(std::string_view line, int line_no) {
  std::vector<LineToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    int col = static_cast<int>(i) + 1;
    if (c == ':') {
      out.push_back({LineToken::Colon, ":", col});
      ++i;
    } else if (c == ',') {
      out.push_back({LineToken::Comma, ",", col});
      ++i;
    } else if (c == '<' && i + 1 < line.size() && line[i + 1] == '-') {
      out.push_back({LineToken::Arrow, "<-", col});
      i += 2;
    } else {
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
             line[i] != ':' && line[i] != ',' &&
             !(line[i] == '<' && i + 1 < line.size() && line[i + 1] == '-')) {
        ++i;
      }
      std::string word(line.substr(start, i - start));
      if (!is_valid_name(word)) {
        throw ParseError(Diag::PolicySyntaxError, line_no, col, "invalid name '" + word + "'");
      }
      out.push_back({LineToken::Word, std::move(word), col});
    }
  }
  return out;
}

struct PendingDeny {
  std::string function;
  std::string sink;
  std::string source;
  int line;
  int col;
};

class LineReader {
 public:
  explicit LineReader(const std::vector<LineToken>& tokens, int line_no)
      : tokens_(tokens), line_(line_no) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const LineToken& peek() const {
    if (done()) fail("unexpected end of line");
    return tokens_[pos_];
  }

  std::string word(const char* what) {
    if (done() || tokens_[pos_].kind != LineToken::Word) fail(what);
    return tokens_[pos_++].text;
  }

  void punct(LineToken::Kind kind, const char* what) {
    if (done() || tokens_[pos_].kind != kind) fail(what);
    ++pos_;
  }

  bool eat(LineToken::Kind kind) {
    if (!done() && tokens_[pos_].kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const char* what) const {
    int col = pos_ < tokens_.size() ? tokens_[pos_].col : (tokens_.empty() ? 1 : tokens_.back().col);
    throw ParseError(Diag::PolicySyntaxError, line_, col, what);
  }

 private:
  const std::vector<LineToken>& tokens_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

bool PolicySpec::has_source_label(std::string_view label) const {
  for (const auto& [api, l] : sources) {
    if (l == label) return true;
  }
  return false;
}

bool PolicySpec::has_sink_label(std::string_view label) const {
  for (const auto& [api, l] : sinks) {
    if (l == label) return true;
  }
  return false;
}

PolicySpec parse_policy(std::string_view text) {
  PolicySpec spec;
  std::vector<PendingDeny> pending;
  std::set<std::string> source_labels;
  std::set<std::string> sink_labels;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<LineToken> tokens = tokenize_line(line, line_no);
    if (tokens.empty()) continue;

    LineReader reader(tokens, line_no);
    std::string head = reader.word("expected 'source', 'sink' or 'rule'");
    if (head == "source" || head == "sink") {
      std::string api = reader.word("expected API name");
      std::string as = reader.word("expected 'as'");
      if (as != "as") reader.fail("expected 'as'");
      std::string label = reader.word("expected label");
      if (!reader.done()) reader.fail("trailing tokens after declaration");
      if (spec.sources.count(api) || spec.sinks.count(api)) {
        throw ParseError(Diag::DuplicateApi, line_no, tokens[1].col,
                         "API '" + api + "' declared twice");
      }
      auto& labels = head == "source" ? source_labels : sink_labels;
      if (!labels.insert(label).second) {
        throw ParseError(Diag::DuplicateLabel, line_no, tokens[3].col,
                         "label '" + label + "' declared twice");
      }
      (head == "source" ? spec.sources : spec.sinks).emplace(std::move(api), std::move(label));
    } else if (head == "rule") {
      std::string function = reader.word("expected function name");
      reader.punct(LineToken::Colon, "expected ':'");
      do {
        std::string deny = reader.word("expected 'deny'");
        if (deny != "deny") reader.fail("expected 'deny'");
        const LineToken& sink_tok = reader.peek();
        std::string sink = reader.word("expected sink label");
        reader.punct(LineToken::Arrow, "expected '<-'");
        std::string source = reader.word("expected source label");
        pending.push_back({function, std::move(sink), std::move(source), line_no, sink_tok.col});
      } while (reader.eat(LineToken::Comma));
      if (!reader.done()) reader.fail("trailing tokens after rule");
      spec.default_deny_all = false;
    } else {
      throw ParseError(Diag::PolicySyntaxError, line_no, tokens[0].col,
                       "expected 'source', 'sink' or 'rule', got '" + head + "'");
    }
  }

  // Declarations may appear after the rules that use them.
  for (PendingDeny& deny : pending) {
    if (!sink_labels.count(deny.sink)) {
      throw ParseError(Diag::UndeclaredLabel, deny.line, deny.col,
                       "undeclared sink label '" + deny.sink + "'");
    }
    if (!source_labels.count(deny.source)) {
      throw ParseError(Diag::UndeclaredLabel, deny.line, deny.col,
                       "undeclared source label '" + deny.source + "'");
    }
    spec.rules[deny.function].insert(DenyPair{std::move(deny.sink), std::move(deny.source)});
  }
  return spec;
}

Classification classify_callee(const PolicySpec& spec, const Program& program,
                               std::string_view name) {
  if (program.find(name)) return {CalleeKind::Internal, {}};
  std::string key(name);
  if (auto it = spec.sources.find(key); it != spec.sources.end()) {
    return {CalleeKind::Source, it->second};
  }
  if (auto it = spec.sinks.find(key); it != spec.sinks.end()) {
    return {CalleeKind::Sink, it->second};
  }
  return {CalleeKind::ExternalUnknown, {}};
}

std::set<DenyPair> rules_for(const PolicySpec& spec, const std::set<std::string>& roots,
                             std::string_view function) {
  if (spec.default_deny_all) {
    std::set<DenyPair> all;
    if (roots.count(std::string(function))) {
      for (const auto& [sink_api, sink_label] : spec.sinks) {
        for (const auto& [source_api, source_label] : spec.sources) {
          all.insert(DenyPair{sink_label, source_label});
        }
      }
    }
    return all;
  }
  auto it = spec.rules.find(std::string(function));
  if (it == spec.rules.end()) return {};
  return it->second;
}

std::set<DenyPair> rules_for(const PolicySpec& spec, const Program& program,
                             std::string_view function) {
  program.require(function);
  return rules_for(spec, roots_of(program), function);
}

}  // namespace dcert
