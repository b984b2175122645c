#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcert/certificate.hpp"
#include "dcert/ir.hpp"
#include "dcert/policy.hpp"

namespace dcert {

enum class MutationKind {
  DropPair,            // remove one pair from one entry
  DropPairEverywhere,  // remove every pair mentioning a label
  DropEntry,           // empty one entry, keep the block
  DropAllEntries,      // empty certificate
  AddSpuriousPair,     // insert a well-formed pair absent from the entry
  AddSinkCall,         // program edit: sink call on a variable before the final return
};

std::string_view mutation_kind_name(MutationKind kind);

/// One reproducible tampering step. The locus fields used depend on the
/// kind; sink_api names the API inserted by AddSinkCall.
struct Mutation {
  MutationKind kind = MutationKind::DropPair;
  std::string function;
  std::optional<FlowPair> pair;
  std::string label;
  std::string variable;
  std::string sink_api;
  std::uint64_t seed = 0;
};

/// Applies a certificate mutation. Throws std::invalid_argument when the
/// locus does not exist (unknown function, absent pair, unmentioned label,
/// already-present spurious pair).
Certificate mutate_certificate(const Certificate& certificate, const Mutation& mutation);

/// Applies AddSinkCall: inserts "call sink_api(variable);" immediately before
/// the function's final top-level return. Throws std::invalid_argument when
/// the function has no return or the variable never holds a value there.
Program mutate_program(const Program& program, const Mutation& mutation);

struct TamperRow {
  MutationKind kind;
  bool applicable = false;
  std::string description;   // chosen locus, or why the row is N/A
  std::string observed;      // DETECTED / ACCEPTED rendering
  std::string expected;
  bool ok = false;           // observed matches expected (N/A rows count as ok)
};

struct TamperSuiteResult {
  std::vector<TamperRow> rows;
  bool all_ok = false;
};

/// Runs the whole mutation taxonomy against the program's genuine
/// certificate and re-checks each mutant. Deterministic locus selection;
/// rows whose precondition the input cannot meet are reported N/A.
TamperSuiteResult run_tamper_suite(const Program& program, const PolicySpec& spec);

std::string render(const TamperSuiteResult& result);

}  // namespace dcert
