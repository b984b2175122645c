#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dcert/analyzer.hpp"
#include "dcert/checker.hpp"
#include "dcert/diag.hpp"
#include "dcert/oracle.hpp"
#include "dcert/tamper.hpp"

namespace {

// Exit codes, stable across releases:
//   0 certificate valid and policy holds
//   1 certificate valid and policy violated (or tamper rows missed)
//   2 certificate invalid
//   3 input or parse error
//   4 internal error
constexpr int kExitHolds = 0;
constexpr int kExitViolated = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInputError = 3;
constexpr int kExitInternal = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw InputError("cannot write '" + path + "'");
}

dcert::Program load_program(const std::string& path) {
  try {
    return dcert::parse_program(read_file(path));
  } catch (const dcert::ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

dcert::PolicySpec load_policy(const std::string& path) {
  try {
    return dcert::parse_policy(read_file(path));
  } catch (const dcert::ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

dcert::Certificate load_certificate(const std::string& path) {
  try {
    return dcert::decode(read_file(path));
  } catch (const dcert::ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

/// Per-rule status lines plus the overall verdict, evaluated on a freshly
/// produced certificate. Returns true when some rule is violated.
bool report_policy(const dcert::Program& program, const dcert::PolicySpec& spec,
                   const dcert::Certificate& certificate) {
  std::set<std::string> roots = dcert::roots_of(program);
  bool violated = false;
  for (const dcert::Function& fn : program.functions) {
    for (const dcert::DenyPair& rule : dcert::rules_for(spec, roots, fn.name)) {
      dcert::FlowPair denied{dcert::FlowTarget::sink(rule.sink),
                             dcert::FlowOrigin::source(rule.source)};
      bool broken = certificate.entries.at(fn.name).contains(denied);
      violated |= broken;
      std::cout << "RULE " << fn.name << ": deny " << rule.sink << " <- " << rule.source << " "
                << (broken ? "VIOLATED" : "OK") << "\n";
    }
  }
  std::cout << "POLICY: " << (violated ? "VIOLATED" : "HOLDS") << "\n";
  return violated;
}

int run_analyze(const std::string& program_path, const std::string& policy_path,
                const std::string& output_path, const std::string& mode, bool trace) {
  dcert::Program program = load_program(program_path);
  dcert::PolicySpec spec = load_policy(policy_path);

  dcert::FixpointMode fixpoint =
      mode == "jacobi" ? dcert::FixpointMode::Jacobi : dcert::FixpointMode::Worklist;
  if (trace && fixpoint != dcert::FixpointMode::Jacobi) {
    std::cerr << "note: --trace only applies with --mode jacobi\n";
  }
  dcert::AnalysisResult result = dcert::analyze_program(program, spec, fixpoint);
  if (trace && fixpoint == dcert::FixpointMode::Jacobi) {
    for (std::size_t i = 0; i < result.rounds.size(); ++i) {
      std::cout << "round " << i << "\n" << dcert::render_entries(result.rounds[i]);
    }
  }
  write_file(output_path, dcert::encode(result.certificate));
  bool violated = report_policy(program, spec, result.certificate);
  return violated ? kExitViolated : kExitHolds;
}

int run_check(const std::string& program_path, const std::string& policy_path,
              const std::string& certificate_path, bool strict) {
  dcert::Program program = load_program(program_path);
  dcert::PolicySpec spec = load_policy(policy_path);
  dcert::Certificate certificate = load_certificate(certificate_path);

  dcert::CheckReport report = dcert::check(program, spec, certificate, strict);
  std::cout << report.render();
  if (!report.certificate_valid) return kExitInvalid;
  return report.policy_holds ? kExitHolds : kExitViolated;
}

int run_oracle(const std::string& program_path, const std::string& policy_path, int depth) {
  dcert::Program program = load_program(program_path);
  dcert::PolicySpec spec = load_policy(policy_path);

  dcert::OracleResult result = dcert::enumerate_flows(program, spec, depth);
  for (const auto& [name, flows] : result.flows) {
    std::cout << "fn " << name << "\n";
    if (flows.inconclusive) {
      std::cout << "  inconclusive\n";
      continue;
    }
    for (const dcert::FlowPair& pair : flows.pairs) {
      std::cout << "  " << dcert::render(pair) << "\n";
    }
  }
  return kExitHolds;
}

int run_tamper(const std::string& program_path, const std::string& policy_path) {
  dcert::Program program = load_program(program_path);
  dcert::PolicySpec spec = load_policy(policy_path);

  dcert::TamperSuiteResult result = dcert::run_tamper_suite(program, spec);
  std::cout << dcert::render(result);
  return result.all_ok ? kExitHolds : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcert: interprocedural taint certificates — analyze, check, tamper-test"};
  app.require_subcommand(1);

  std::string program_path, policy_path, certificate_path, output_path;
  std::string mode = "worklist";
  bool trace = false;
  bool strict = false;
  int depth = 4;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute function summaries, write a certificate, report the policy verdict");
  analyze->add_option("program", program_path, "program file (.dct)")->required();
  analyze->add_option("policy", policy_path, "policy file (.dcp)")->required();
  analyze->add_option("-o,--output", output_path, "certificate output path (.dcrt)")->required();
  analyze->add_option("--mode", mode, "fixpoint engine")
      ->check(CLI::IsMember({"worklist", "jacobi"}));
  analyze->add_flag("--trace", trace, "print per-round summary maps (jacobi mode)");

  CLI::App* check = app.add_subcommand(
      "check", "Validate a certificate against a program and decide the policy");
  check->add_option("program", program_path, "program file (.dct)")->required();
  check->add_option("policy", policy_path, "policy file (.dcp)")->required();
  check->add_option("certificate", certificate_path, "certificate file (.dcrt)")->required();
  check->add_flag("--strict", strict, "demand exact summaries, not just sound ones");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Debug: brute-force flow enumeration by inlining and path interpretation");
  oracle->add_option("program", program_path, "program file (.dct)")->required();
  oracle->add_option("policy", policy_path, "policy file (.dcp)")->required();
  oracle->add_option("--depth", depth, "inlining depth limit")->check(CLI::PositiveNumber);

  CLI::App* tamper = app.add_subcommand(
      "tamper-suite", "Mutate the genuine certificate and program; verify the checker objects");
  tamper->add_option("program", program_path, "program file (.dct)")->required();
  tamper->add_option("policy", policy_path, "policy file (.dcp)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (analyze->parsed()) return run_analyze(program_path, policy_path, output_path, mode, trace);
    if (check->parsed()) return run_check(program_path, policy_path, certificate_path, strict);
    if (oracle->parsed()) return run_oracle(program_path, policy_path, depth);
    if (tamper->parsed()) return run_tamper(program_path, policy_path);
    return kExitInternal;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
