#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "dcert/certificate.hpp"
#include "dcert/ir.hpp"
#include "dcert/policy.hpp"

namespace dcert {

struct FunctionFlows {
  bool inconclusive = false;  // inlining budget ran out with internal calls left
  std::set<FlowPair> pairs;

  bool operator==(const FunctionFlows&) const = default;
};

struct OracleResult {
  std::map<std::string, FunctionFlows> flows;

  bool operator==(const OracleResult&) const = default;
};

/// Ground-truth flow enumeration, built from machinery deliberately unlike
/// the analyzer's: internal calls are inlined with fresh-renamed locals (up
/// to depth_limit levels), then every execution path of the flattened body
/// is interpreted flow-sensitively. Branch bodies may be skipped entirely,
/// loops run any number of times, and reassignment overwrites taint, so only
/// an unconditional later reassignment on every path kills a flow. Exponential
/// by design; intended for desk-scale inputs only.
OracleResult enumerate_flows(const Program& program, const PolicySpec& spec,
                             int depth_limit = 4);

enum class OracleVerdict { Exact, Sound, Unsound };

struct OracleComparison {
  OracleVerdict verdict = OracleVerdict::Exact;
  /// For Unsound: an oracle-found flow the certificate misses.
  std::optional<std::pair<std::string, FlowPair>> witness;
};

/// Certificate vs oracle, over the same function set: Unsound if the
/// certificate misses an oracle flow, Exact if every conclusive function
/// matches exactly and none is inconclusive, Sound otherwise.
OracleComparison compare(const Certificate& certificate, const OracleResult& oracle);

}  // namespace dcert
