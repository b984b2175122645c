#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "dcert/diag.hpp"
#include "dcert/ir.hpp"

namespace dcert {

/// A denied flow: no data may reach sink label `sink` from source label
/// `source` in the function the rule is attached to.
struct DenyPair {
  std::string sink;
  std::string source;

  auto operator<=>(const DenyPair&) const = default;
};

/// Parsed `.dcp` policy: source/sink API declarations with their short
/// labels, plus per-function deny rules. If the text contains no `rule`
/// line, the implicit property applies: every source-to-sink flow is denied
/// (at root functions).
struct PolicySpec {
  std::map<std::string, std::string> sources;  // API name -> source label
  std::map<std::string, std::string> sinks;    // API name -> sink label
  std::map<std::string, std::set<DenyPair>> rules;
  bool default_deny_all = true;

  bool has_source_label(std::string_view label) const;
  bool has_sink_label(std::string_view label) const;

  bool operator==(const PolicySpec&) const = default;
};

enum class CalleeKind { Internal, Source, Sink, ExternalUnknown };

struct Classification {
  CalleeKind kind = CalleeKind::ExternalUnknown;
  std::string label;  // set for Source and Sink

  bool operator==(const Classification&) const = default;
};

PolicySpec parse_policy(std::string_view text);

/// Dispatch for call transfer: a callee name is exactly one of a defined
/// function, a declared source API, a declared sink API, or an unknown
/// external. Definitions in the program shadow API declarations.
Classification classify_callee(const PolicySpec& spec, const Program& program,
                               std::string_view name);

/// Deny rules in force for function f. Under default deny-all the full
/// sinks x sources cross product applies, but only at root functions;
/// interior functions are covered through summary propagation into roots.
std::set<DenyPair> rules_for(const PolicySpec& spec, const Program& program,
                             std::string_view function);

/// Same, with the root set precomputed by the caller.
std::set<DenyPair> rules_for(const PolicySpec& spec, const std::set<std::string>& roots,
                             std::string_view function);

}  // namespace dcert
