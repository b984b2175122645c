#pragma once

#include <string>
#include <vector>

#include "dcert/analyzer.hpp"
#include "dcert/certificate.hpp"
#include "dcert/ir.hpp"
#include "dcert/policy.hpp"

namespace dcert {

enum class FailureKind { MissingEntry, MalformedPair, Inconsistent, NotTight };

std::string_view failure_kind_name(FailureKind kind);

struct Failure {
  FailureKind kind;
  std::string function;
  std::string detail;  // rendered offending pair or explanatory text

  bool operator==(const Failure&) const = default;
};

struct Violation {
  std::string function;
  DenyPair pair;

  auto operator<=>(const Violation&) const = default;
};

/// Verdict of one checker run. `policy_holds` is meaningful only when the
/// certificate is valid; it is reported false otherwise (fail closed).
struct CheckReport {
  bool certificate_valid = false;
  bool policy_holds = false;
  std::vector<Failure> failures;
  std::vector<Violation> violations;

  /// Deterministic text: sorted failure lines, sorted violation lines, then
  /// "VERDICT: VALID|INVALID POLICY: HOLDS|VIOLATED|SKIPPED".
  std::string render() const;
};

/// Every defined function must have an entry; entries naming undefined
/// functions are rejected.
std::vector<Failure> check_coverage(const Program& program, const Certificate& certificate);

/// Referential integrity of every pair: Param origins must name a parameter
/// of their function and labels must be declared in the policy.
std::vector<Failure> check_wellformed(const Program& program, const PolicySpec& spec,
                                      const Certificate& certificate);

/// One local analysis per function, taking certificate entries as callee
/// summaries — no fixpoint. A pair the recomputation demands but the entry
/// lacks is Inconsistent; in strict mode a pair the entry carries but the
/// recomputation cannot justify is NotTight. Requires clean coverage and
/// well-formedness.
std::vector<Failure> check_consistency(const Program& program, const PolicySpec& spec,
                                       const Certificate& certificate, bool strict);

/// Policy entailment read off the certificate alone: rule (k, s) on f is
/// violated iff (sink:k <- source:s) sits in f's entry.
std::vector<Violation> check_policy(const Program& program, const PolicySpec& spec,
                                    const Certificate& certificate);

/// Full pipeline: coverage, well-formedness, consistency, then policy.
/// Consistency runs only when the earlier passes are clean (its precondition);
/// policy runs only on a valid certificate.
CheckReport check(const Program& program, const PolicySpec& spec,
                  const Certificate& certificate, bool strict = false);

}  // namespace dcert
