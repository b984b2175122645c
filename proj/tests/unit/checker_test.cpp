#include <doctest.h>

#include <random>

#include "dcert/checker.hpp"
#include "dcert/tamper.hpp"
#include "support/fixtures.hpp"
#include "support/generator.hpp"

using namespace dcert;

namespace {

std::set<std::string> failing_functions(const std::vector<Failure>& failures) {
  std::set<std::string> out;
  for (const Failure& failure : failures) out.insert(failure.function);
  return out;
}

}  // namespace

TEST_CASE("check_coverage") {
  Program program = testing::leak_program();
  CHECK(check_coverage(program, testing::leak_certificate()).empty());

  std::vector<Failure> missing = check_coverage(program, Certificate{});
  CHECK(missing.size() == 5);
  for (const Failure& failure : missing) CHECK(failure.kind == FailureKind::MissingEntry);

  Program one = parse_program("fn f() { return; }");
  Certificate ghost;
  ghost.entries["f"];
  ghost.entries["zzz"];
  std::vector<Failure> alien = check_coverage(one, ghost);
  REQUIRE(alien.size() == 1);
  CHECK(alien[0].kind == FailureKind::MalformedPair);
  CHECK(alien[0].function == "zzz");
}

TEST_CASE("check_wellformed") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  CHECK(check_wellformed(program, spec, testing::leak_certificate()).empty());

  SUBCASE("unknown parameter") {
    Certificate certificate = testing::leak_certificate();
    certificate.entries["Send"].insert({FlowTarget::sink("sms"), FlowOrigin::param("q")});
    std::vector<Failure> failures = check_wellformed(program, spec, certificate);
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].kind == FailureKind::MalformedPair);
    CHECK(failures[0].function == "Send");
  }
  SUBCASE("undeclared source label") {
    Certificate certificate = testing::leak_certificate();
    certificate.entries["foo"].insert({FlowTarget::ret(), FlowOrigin::source("ghost")});
    std::vector<Failure> failures = check_wellformed(program, spec, certificate);
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].kind == FailureKind::MalformedPair);
  }
  SUBCASE("undeclared sink label") {
    Certificate certificate = testing::leak_certificate();
    certificate.entries["foo"].insert({FlowTarget::sink("ghost"), FlowOrigin::source("id")});
    std::vector<Failure> failures = check_wellformed(program, spec, certificate);
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].kind == FailureKind::MalformedPair);
  }
}

TEST_CASE("check_consistency accepts the genuine certificate, strictly") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  CHECK(check_consistency(program, spec, testing::leak_certificate(), true).empty());
}

TEST_CASE("dropping the propagated pair is caught at bar, not foo") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  FlowPair leak{FlowTarget::sink("sms"), FlowOrigin::source("id")};
  Certificate certificate = testing::leak_certificate();
  certificate.entries["foo"].pairs.erase(leak);
  certificate.entries["bar"].pairs.erase(leak);

  std::vector<Failure> failures = check_consistency(program, spec, certificate, false);
  CHECK(failing_functions(failures) == std::set<std::string>{"bar"});
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].kind == FailureKind::Inconsistent);
  CHECK(failures[0].detail.find(render(leak)) != std::string::npos);
}

TEST_CASE("removing a seed label is caught at the seed function") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Mutation mutation{MutationKind::DropPairEverywhere};
  mutation.label = "id";
  Certificate certificate = mutate_certificate(testing::leak_certificate(), mutation);

  std::vector<Failure> failures = check_consistency(program, spec, certificate, false);
  std::set<std::string> functions = failing_functions(failures);
  CHECK(functions.count("getId"));  // direct getDeviceId call forces (ret, id)
}

TEST_CASE("a stale certificate misses the flow added by a code edit") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Mutation mutation{MutationKind::AddSinkCall, "bar"};
  mutation.variable = "y";
  mutation.sink_api = "sendTextMessage";
  Program edited = mutate_program(program, mutation);

  std::vector<Failure> failures =
      check_consistency(edited, spec, testing::leak_certificate(), false);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].function == "bar");
  CHECK(failures[0].kind == FailureKind::Inconsistent);
  CHECK(failures[0].detail.find("sink:sms <- source:num") != std::string::npos);
}

TEST_CASE("spurious pairs pass sound checking but fail strict checking") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Certificate padded = testing::leak_certificate();
  FlowPair spurious{FlowTarget::ret(), FlowOrigin::source("id")};
  padded.entries["foo"].insert(spurious);

  CHECK(check_consistency(program, spec, padded, false).empty());
  std::vector<Failure> strict = check_consistency(program, spec, padded, true);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].kind == FailureKind::NotTight);
  CHECK(strict[0].function == "foo");
  CHECK(strict[0].detail.find(render(spurious)) != std::string::npos);
}

TEST_CASE("check_policy") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Certificate certificate = testing::leak_certificate();

  std::vector<Violation> violations = check_policy(program, spec, certificate);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].function == "foo");
  CHECK(violations[0].pair == DenyPair{"sms", "id"});

  SUBCASE("sourceless program under deny-all has nothing to violate") {
    Program quiet = parse_program("fn f() { x = const; call sendTextMessage(x); return x; }");
    PolicySpec deny_all = parse_policy(testing::leak_policy_default_deny_text());
    Certificate c = analyze_program(quiet, deny_all).certificate;
    CHECK(check_policy(quiet, deny_all, c).empty());
  }
  SUBCASE("explicit rule on an interior function") {
    PolicySpec bar_rule = parse_policy(
        "source getDeviceId as id\nsource getLine1Number as num\n"
        "sink sendTextMessage as sms\nrule bar: deny sms <- id\n");
    std::vector<Violation> hits = check_policy(program, bar_rule, certificate);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].function == "bar");
    CHECK(hits[0].pair == DenyPair{"sms", "id"});
  }
}

TEST_CASE("check assembles the full report") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();

  SUBCASE("genuine inputs: valid, policy violated") {
    CheckReport report = check(program, spec, testing::leak_certificate());
    CHECK(report.certificate_valid);
    CHECK_FALSE(report.policy_holds);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].function == "foo");
    CHECK(report.violations[0].pair == DenyPair{"sms", "id"});
    CHECK(report.render().find("VERDICT: VALID POLICY: VIOLATED") != std::string::npos);
  }
  SUBCASE("empty certificate: invalid, policy skipped and reported false") {
    CheckReport report = check(program, spec, Certificate{});
    CHECK_FALSE(report.certificate_valid);
    CHECK_FALSE(report.policy_holds);
    CHECK(report.failures.size() == 5);
    CHECK(report.render().find("VERDICT: INVALID POLICY: SKIPPED") != std::string::npos);
  }
  SUBCASE("vacuous policy: valid and holding") {
    PolicySpec vacuous = parse_policy(
        "source getDeviceId as id\nsource getLine1Number as num\n"
        "sink sendTextMessage as sms\nrule nobody: deny sms <- id\n");
    CheckReport report = check(program, vacuous, testing::leak_certificate());
    CHECK(report.certificate_valid);
    CHECK(report.policy_holds);
    CHECK(report.render().find("VERDICT: VALID POLICY: HOLDS") != std::string::npos);
  }
}

TEST_CASE("degenerate programs check cleanly") {
  PolicySpec spec = parse_policy("source s as a\nsink k as b\n");

  SUBCASE("empty program, empty certificate") {
    Program empty = parse_program("");
    CheckReport report = check(empty, spec, analyze_program(empty, spec).certificate, true);
    CHECK(report.certificate_valid);
    CHECK(report.policy_holds);
  }
  SUBCASE("mutual recursion with no base case") {
    Program mutual = parse_program(
        "fn f(a) { x = call g(a); return x; } fn g(b) { y = call f(b); return y; }");
    CHECK(roots_of(mutual).empty());
    Certificate certificate = analyze_program(mutual, spec).certificate;
    CHECK(certificate.entries.at("f").empty());
    CHECK(check(mutual, spec, certificate, true).certificate_valid);
  }
}

TEST_CASE("analyzer output always self-checks strictly") {
  std::mt19937_64 rng(6006);
  for (int i = 0; i < 100; ++i) {
    testing::GenConfig config;
    config.allow_cycles = (i % 3) == 0;
    testing::GeneratedCase c = testing::generate_case(rng, config);
    Certificate certificate = analyze_program(c.program, c.policy).certificate;
    CheckReport report = check(c.program, c.policy, certificate, /*strict=*/true);
    CHECK(report.certificate_valid);
  }
}

TEST_CASE("any closed padding of the genuine certificate passes sound checking") {
  std::mt19937_64 rng(7007);
  for (int i = 0; i < 80; ++i) {
    testing::GeneratedCase c = testing::generate_case(rng, testing::GenConfig{});
    Certificate certificate = analyze_program(c.program, c.policy).certificate;
    SummaryMap padded = certificate.entries;
    for (const Function& fn : c.program.functions) {
      int extra = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int p = 0; p < extra; ++p) {
        padded[fn.name].insert(testing::random_wellformed_pair(rng, c.policy, fn));
      }
    }
    Certificate closed{close_summaries(c.program, c.policy, padded)};
    CheckReport report = check(c.program, c.policy, closed, /*strict=*/false);
    CHECK(report.certificate_valid);
  }
}

TEST_CASE("checking runs one local analysis per function") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Certificate certificate = testing::leak_certificate();

  std::uint64_t before = analyze_function_invocations();
  check(program, spec, certificate, /*strict=*/true);
  CHECK(analyze_function_invocations() - before == program.functions.size());
}

TEST_CASE("report text is deterministic and sorted") {
  Program program = testing::leak_program();
  PolicySpec spec = testing::leak_policy();
  Certificate certificate = testing::leak_certificate();
  certificate.entries["bar"].pairs.clear();
  certificate.entries["getId"].pairs.clear();

  CheckReport once = check(program, spec, certificate);
  CheckReport twice = check(program, spec, certificate);
  CHECK(once.render() == twice.render());

  std::string text = once.render();
  std::size_t bar = text.find("FAIL Inconsistent bar");
  std::size_t get_id = text.find("FAIL Inconsistent getId");
  REQUIRE(bar != std::string::npos);
  REQUIRE(get_id != std::string::npos);
  CHECK(bar < get_id);
}
