#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dcert/certificate.hpp"
#include "dcert/ir.hpp"
#include "dcert/policy.hpp"

namespace dcert {

/// Intraprocedural taint state: local variable -> origins that may reach it.
/// Origins are parameters of the current function or declared source labels.
using TaintEnv = std::map<std::string, std::set<FlowOrigin>>;

/// Working state of the interprocedural fixpoint, keyed by function name.
using SummaryMap = std::map<std::string, Summary>;

enum class FixpointMode { Worklist, Jacobi };

struct AnalysisResult {
  Certificate certificate;
  /// Jacobi mode only: the map after each round, rounds[0] being the all-empty
  /// initial map and the last round equal to the one before it.
  std::vector<SummaryMap> rounds;
};

/// One local analysis of f: monotone flow-insensitive transfer over the body
/// (nested blocks included, branch and loop conditions induce no flow),
/// swept repeatedly until the taint environment and the emitted pair set
/// stabilize. Callee effects come exclusively from `callee_summaries`, which
/// must cover every defined callee of f.
Summary analyze_function(const Program& program, const Function& function,
                         const PolicySpec& spec, const SummaryMap& callee_summaries);

/// Interprocedural fixpoint over all functions, starting from all-empty
/// summaries. Worklist is the default engine; Jacobi recomputes every
/// function from the previous round's frozen map (in source order) and
/// records the per-round trace. Both reach the same least fixpoint.
AnalysisResult analyze_program(const Program& program, const PolicySpec& spec,
                               FixpointMode mode = FixpointMode::Worklist);

/// Least post-fixpoint above `start`: runs the worklist beginning from the
/// given map instead of empty summaries. `start` must have an entry per
/// defined function.
SummaryMap close_summaries(const Program& program, const PolicySpec& spec, SummaryMap start);

/// Process-wide count of analyze_function invocations. The checker's
/// single-pass contract is asserted against deltas of this counter.
std::uint64_t analyze_function_invocations();

}  // namespace dcert
