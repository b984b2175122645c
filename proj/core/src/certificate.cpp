#include "dcert/certificate.hpp"

#include <algorithm>

namespace dcert {

std::string render(const FlowTarget& target) {
  if (target.is_ret()) return "ret";
  return "sink:" + target.label;
}

std::string render(const FlowOrigin& origin) {
  if (origin.is_param()) return "param:" + origin.text;
  return "source:" + origin.text;
}

std::string render(const FlowPair& pair) {
  return render(pair.target) + " <- " + render(pair.origin);
}

Summary join(Summary a, const Summary& b) {
  a.pairs.insert(b.pairs.begin(), b.pairs.end());
  return a;
}

bool is_subset(const Summary& a, const Summary& b) {
  return std::includes(b.pairs.begin(), b.pairs.end(), a.pairs.begin(), a.pairs.end());
}

std::string render_entries(const std::map<std::string, Summary>& entries) {
  std::string out;
  for (const auto& [name, summary] : entries) {
    out += "fn ";
    out += name;
    out += '\n';
    for (const FlowPair& pair : summary.pairs) {
      out += "  ";
      out += render(pair);
      out += '\n';
    }
  }
  return out;
}

std::string encode(const Certificate& certificate) {
  return "DCERT-1\n" + render_entries(certificate.entries);
}

namespace {

constexpr std::string_view kHeader = "DCERT-1";

[[noreturn]] void reject(Diag code, int line, const std::string& message) {
  throw ParseError(code, line, 1, message);
}

FlowTarget parse_target(std::string_view text, int line) {
  if (text == "ret") return FlowTarget::ret();
  if (text.starts_with("sink:")) {
    std::string_view label = text.substr(5);
    if (is_valid_name(label)) return FlowTarget::sink(std::string(label));
  }
  reject(Diag::MalformedNode, line, "malformed flow target '" + std::string(text) + "'");
}

FlowOrigin parse_origin(std::string_view text, int line) {
  if (text.starts_with("param:")) {
    std::string_view name = text.substr(6);
    if (is_valid_name(name)) return FlowOrigin::param(std::string(name));
  } else if (text.starts_with("source:")) {
    std::string_view label = text.substr(7);
    if (is_valid_name(label)) return FlowOrigin::source(std::string(label));
  }
  reject(Diag::MalformedNode, line, "malformed flow origin '" + std::string(text) + "'");
}

}  // namespace

Certificate decode(std::string_view bytes) {
  if (!bytes.ends_with('\n')) {
    reject(Diag::BadHeader, 1, "certificate must be LF-terminated text");
  }

  Certificate certificate;
  Summary* block = nullptr;
  std::string block_name;
  std::string last_pair_line;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (line.find('\r') != std::string_view::npos) {
      reject(Diag::MalformedNode, line_no, "CR byte in certificate; LF endings only");
    }
    if (line_no == 1) {
      if (line != kHeader) {
        reject(Diag::BadHeader, 1, "expected header 'DCERT-1'");
      }
      continue;
    }
    if (line.starts_with("fn ")) {
      std::string_view name = line.substr(3);
      if (!is_valid_name(name)) {
        reject(Diag::MalformedNode, line_no, "malformed function name '" + std::string(name) + "'");
      }
      if (block) {
        if (name == block_name) {
          reject(Diag::DuplicateFunctionBlock, line_no,
                 "duplicate block for function '" + std::string(name) + "'");
        }
        if (name < block_name) {
          reject(Diag::NonCanonical, line_no, "function blocks out of order at '" +
                                                  std::string(name) + "'");
        }
      }
      if (certificate.entries.count(std::string(name))) {
        reject(Diag::DuplicateFunctionBlock, line_no,
               "duplicate block for function '" + std::string(name) + "'");
      }
      block_name = std::string(name);
      block = &certificate.entries[block_name];
      last_pair_line.clear();
      continue;
    }
    if (line.starts_with("  ")) {
      if (!block) {
        reject(Diag::MalformedNode, line_no, "pair line before any function block");
      }
      std::string_view body = line.substr(2);
      std::size_t sep = body.find(" <- ");
      if (sep == std::string_view::npos) {
        reject(Diag::MalformedNode, line_no, "pair line lacks ' <- ' separator");
      }
      FlowPair pair{parse_target(body.substr(0, sep), line_no),
                    parse_origin(body.substr(sep + 4), line_no)};
      std::string canonical = render(pair);
      if (canonical != body) {
        reject(Diag::MalformedNode, line_no, "pair line is not in canonical form");
      }
      if (!last_pair_line.empty()) {
        if (canonical == last_pair_line) {
          reject(Diag::NonCanonical, line_no, "duplicate pair '" + canonical + "'");
        }
        if (canonical < last_pair_line) {
          reject(Diag::NonCanonical, line_no, "pair lines out of order at '" + canonical + "'");
        }
      }
      last_pair_line = canonical;
      block->pairs.insert(pair);
      continue;
    }
    reject(Diag::MalformedNode, line_no, "unrecognized line");
  }
  return certificate;
}

}  // namespace dcert
