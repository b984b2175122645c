#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "dcert/diag.hpp"

namespace dcert {

/// Left side of a summary pair: the return slot or a sink label. Enum order
/// matches the byte order of the rendered forms ("ret" < "sink:..."), so the
/// defaulted comparison sorts pairs exactly as their rendered text does.
struct FlowTarget {
  enum class Kind { Ret, Sink };

  Kind kind = Kind::Ret;
  std::string label;  // empty for Ret

  static FlowTarget ret() { return {}; }
  static FlowTarget sink(std::string label) { return {Kind::Sink, std::move(label)}; }

  bool is_ret() const { return kind == Kind::Ret; }
  bool is_sink() const { return kind == Kind::Sink; }

  auto operator<=>(const FlowTarget&) const = default;
};

/// Right side of a summary pair: a parameter of the owning function or a
/// source label. "param:..." < "source:..." matches the enum order.
struct FlowOrigin {
  enum class Kind { Param, Source };

  Kind kind = Kind::Param;
  std::string text;  // parameter name or source label

  static FlowOrigin param(std::string name) { return {Kind::Param, std::move(name)}; }
  static FlowOrigin source(std::string label) { return {Kind::Source, std::move(label)}; }

  bool is_param() const { return kind == Kind::Param; }
  bool is_source() const { return kind == Kind::Source; }

  auto operator<=>(const FlowOrigin&) const = default;
};

/// One externally visible data flow: origin reaches target.
struct FlowPair {
  FlowTarget target;
  FlowOrigin origin;

  auto operator<=>(const FlowPair&) const = default;
};

std::string render(const FlowTarget& target);
std::string render(const FlowOrigin& origin);
std::string render(const FlowPair& pair);  // "TARGET <- ORIGIN"

/// The externally visible flows of one function. Local variables never
/// appear; origins are parameters of the owning function or source labels.
struct Summary {
  std::set<FlowPair> pairs;

  bool contains(const FlowPair& pair) const { return pairs.count(pair) != 0; }
  bool insert(const FlowPair& pair) { return pairs.insert(pair).second; }
  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }

  bool operator==(const Summary&) const = default;
};

/// Join of the summary lattice: plain set union.
Summary join(Summary a, const Summary& b);

bool is_subset(const Summary& a, const Summary& b);

/// The analyzer's result and the checker's input: one summary per defined
/// function. Key-set agreement with the program is enforced by the checker's
/// coverage pass, not by construction.
struct Certificate {
  std::map<std::string, Summary> entries;

  bool operator==(const Certificate&) const = default;
};

/// Canonical block rendering shared by the certificate encoding, the trace
/// printer and the oracle dump: "fn NAME\n" then "  PAIR\n" lines, function
/// blocks by name, pairs in rendered byte order.
std::string render_entries(const std::map<std::string, Summary>& entries);

/// Canonical text encoding. Deterministic: equal certificates produce
/// identical bytes, LF endings, no trailing whitespace.
std::string encode(const Certificate& certificate);

/// Strict inverse of encode. Anything non-canonical is rejected: wrong or
/// missing header, out-of-order or duplicate blocks and pairs, malformed
/// node syntax, stray bytes.
Certificate decode(std::string_view bytes);

}  // namespace dcert
