#include "dcert/checker.hpp"

#include <algorithm>

namespace dcert {

std::string_view failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::MissingEntry: return "MissingEntry";
    case FailureKind::MalformedPair: return "MalformedPair";
    case FailureKind::Inconsistent: return "Inconsistent";
    case FailureKind::NotTight: return "NotTight";
  }
  return "Unknown";
}

namespace {

std::string render_failure(const Failure& failure) {
  std::string line = "FAIL ";
  line += failure_kind_name(failure.kind);
  line += ' ';
  line += failure.function;
  line += ": ";
  line += failure.detail;
  return line;
}

std::string render_violation(const Violation& violation) {
  return "VIOLATION " + violation.function + ": deny " + violation.pair.sink + " <- " +
         violation.pair.source;
}

}  // namespace

std::string CheckReport::render() const {
  std::vector<std::string> lines;
  lines.reserve(failures.size() + violations.size());
  for (const Failure& failure : failures) lines.push_back(render_failure(failure));
  std::sort(lines.begin(), lines.end());
  std::vector<std::string> violation_lines;
  violation_lines.reserve(violations.size());
  for (const Violation& violation : violations) {
    violation_lines.push_back(render_violation(violation));
  }
  std::sort(violation_lines.begin(), violation_lines.end());

  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  for (const std::string& line : violation_lines) {
    out += line;
    out += '\n';
  }
  out += "VERDICT: ";
  out += certificate_valid ? "VALID" : "INVALID";
  out += " POLICY: ";
  if (!certificate_valid) {
    out += "SKIPPED";
  } else {
    out += policy_holds ? "HOLDS" : "VIOLATED";
  }
  out += '\n';
  return out;
}

std::vector<Failure> check_coverage(const Program& program, const Certificate& certificate) {
  std::vector<Failure> failures;
  for (const Function& fn : program.functions) {
    if (!certificate.entries.count(fn.name)) {
      failures.push_back(
          {FailureKind::MissingEntry, fn.name, "no certificate entry for defined function"});
    }
  }
  for (const auto& [name, summary] : certificate.entries) {
    if (!program.find(name)) {
      failures.push_back(
          {FailureKind::MalformedPair, name, "certificate entry names an undefined function"});
    }
  }
  return failures;
}

std::vector<Failure> check_wellformed(const Program& program, const PolicySpec& spec,
                                      const Certificate& certificate) {
  std::set<std::string> source_labels;
  for (const auto& [api, label] : spec.sources) source_labels.insert(label);
  std::set<std::string> sink_labels;
  for (const auto& [api, label] : spec.sinks) sink_labels.insert(label);

  std::vector<Failure> failures;
  for (const auto& [name, summary] : certificate.entries) {
    const Function* fn = program.find(name);
    if (!fn) continue;  // coverage already rejects alien entries
    std::set<std::string> params(fn->params.begin(), fn->params.end());
    for (const FlowPair& pair : summary.pairs) {
      if (pair.origin.is_param() && !params.count(pair.origin.text)) {
        failures.push_back({FailureKind::MalformedPair, name,
                            render(pair) + ": '" + pair.origin.text +
                                "' is not a parameter of '" + name + "'"});
      } else if (pair.origin.is_source() && !source_labels.count(pair.origin.text)) {
        failures.push_back({FailureKind::MalformedPair, name,
                            render(pair) + ": undeclared source label '" + pair.origin.text +
                                "'"});
      }
      if (pair.target.is_sink() && !sink_labels.count(pair.target.label)) {
        failures.push_back({FailureKind::MalformedPair, name,
                            render(pair) + ": undeclared sink label '" + pair.target.label +
                                "'"});
      }
    }
  }
  return failures;
}

std::vector<Failure> check_consistency(const Program& program, const PolicySpec& spec,
                                       const Certificate& certificate, bool strict) {
  std::vector<Failure> failures;
  for (const Function& fn : program.functions) {
    // One local pass, trusting callee entries; direct source/sink calls in fn
    // contribute regardless of the certificate, so removed seeds resurface.
    Summary recomputed = analyze_function(program, fn, spec, certificate.entries);
    const Summary& claimed = certificate.entries.at(fn.name);
    for (const FlowPair& pair : recomputed.pairs) {
      if (!claimed.contains(pair)) {
        failures.push_back(
            {FailureKind::Inconsistent, fn.name, "required pair absent: " + render(pair)});
      }
    }
    if (strict) {
      for (const FlowPair& pair : claimed.pairs) {
        if (!recomputed.contains(pair)) {
          failures.push_back(
              {FailureKind::NotTight, fn.name, "pair not derivable: " + render(pair)});
        }
      }
    }
  }
  return failures;
}

std::vector<Violation> check_policy(const Program& program, const PolicySpec& spec,
                                    const Certificate& certificate) {
  std::set<std::string> roots = roots_of(program);
  std::vector<Violation> violations;
  for (const Function& fn : program.functions) {
    const Summary& summary = certificate.entries.at(fn.name);
    for (const DenyPair& rule : rules_for(spec, roots, fn.name)) {
      FlowPair denied{FlowTarget::sink(rule.sink), FlowOrigin::source(rule.source)};
      if (summary.contains(denied)) {
        violations.push_back({fn.name, rule});
      }
    }
  }
  return violations;
}

CheckReport check(const Program& program, const PolicySpec& spec,
                  const Certificate& certificate, bool strict) {
  CheckReport report;
  report.failures = check_coverage(program, certificate);
  {
    std::vector<Failure> wf = check_wellformed(program, spec, certificate);
    report.failures.insert(report.failures.end(), wf.begin(), wf.end());
  }
  if (report.failures.empty()) {
    report.failures = check_consistency(program, spec, certificate, strict);
  }
  report.certificate_valid = report.failures.empty();
  if (report.certificate_valid) {
    report.violations = check_policy(program, spec, certificate);
    report.policy_holds = report.violations.empty();
  }
  std::sort(report.violations.begin(), report.violations.end());
  auto order = [](const Failure& a, const Failure& b) {
    return std::tie(a.function, a.kind, a.detail) < std::tie(b.function, b.kind, b.detail);
  };
  std::sort(report.failures.begin(), report.failures.end(), order);
  return report;
}

}  // namespace dcert
