#pragma once

#include <string>

#include "dcert/analyzer.hpp"
#include "dcert/certificate.hpp"
#include "dcert/ir.hpp"
#include "dcert/policy.hpp"

namespace dcert::testing {

/// The five-function leak example: foo -> bar -> {getId, Send, getNumber},
/// where getId/getNumber read device identifiers and Send texts its argument.
const std::string& leak_program_text();

/// Declares the two identifier sources, the SMS sink, and denies both flows
/// in foo.
const std::string& leak_policy_text();

/// Same declarations without the rule line, so the implicit deny-all holds.
const std::string& leak_policy_default_deny_text();

Program leak_program();
PolicySpec leak_policy();

/// Expected summary maps after fixpoint rounds 0..3 (round 4 repeats 3).
SummaryMap leak_round_map(int round);

/// The stabilized certificate for the leak example.
Certificate leak_certificate();

/// Canonical encoding of leak_certificate(), frozen byte for byte.
const std::string& leak_certificate_golden();

}  // namespace dcert::testing
