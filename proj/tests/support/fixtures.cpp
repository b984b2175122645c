#include "support/fixtures.hpp"

#include <stdexcept>

namespace dcert::testing {

const std::string& leak_program_text() {
  static const std::string text = R"(# A device-id leak: foo returns what bar returns, and bar
# texts the device id before returning the phone number.

fn foo() {
  x = call bar();
  return x;
}

fn bar() {
  x = call getId();
  call Send(x);
  y = call getNumber();
  return y;
}

fn getId() {
  x = call getDeviceId();
  return x;
}

fn getNumber() {
  x = call getLine1Number();
  return x;
}

fn Send(x) {
  num = const;
  call sendTextMessage(num, x);
}
)";
  return text;
}

const std::string& leak_policy_text() {
  static const std::string text = R"(source getDeviceId as id
source getLine1Number as num
sink sendTextMessage as sms
rule foo: deny sms <- id, deny sms <- num
)";
  return text;
}

const std::string& leak_policy_default_deny_text() {
  static const std::string text = R"(source getDeviceId as id
source getLine1Number as num
sink sendTextMessage as sms
)";
  return text;
}

Program leak_program() { return parse_program(leak_program_text()); }

PolicySpec leak_policy() { return parse_policy(leak_policy_text()); }

namespace {

FlowPair ret_from_source(const std::string& label) {
  return {FlowTarget::ret(), FlowOrigin::source(label)};
}

FlowPair sink_from_source(const std::string& sink, const std::string& label) {
  return {FlowTarget::sink(sink), FlowOrigin::source(label)};
}

}  // namespace

SummaryMap leak_round_map(int round) {
  SummaryMap map;
  map["foo"];
  map["bar"];
  map["getId"];
  map["getNumber"];
  map["Send"];
  if (round >= 1) {
    map["getId"].insert(ret_from_source("id"));
    map["getNumber"].insert(ret_from_source("num"));
    map["Send"].insert({FlowTarget::sink("sms"), FlowOrigin::param("x")});
  }
  if (round >= 2) {
    map["bar"].insert(sink_from_source("sms", "id"));
    map["bar"].insert(ret_from_source("num"));
  }
  if (round >= 3) {
    map["foo"].insert(sink_from_source("sms", "id"));
    map["foo"].insert(ret_from_source("num"));
  }
  if (round < 0 || round > 3) throw std::out_of_range("rounds are 0..3");
  return map;
}

Certificate leak_certificate() { return Certificate{leak_round_map(3)}; }

const std::string& leak_certificate_golden() {
  static const std::string text =
      "DCERT-1\n"
      "fn Send\n"
      "  sink:sms <- param:x\n"
      "fn bar\n"
      "  ret <- source:num\n"
      "  sink:sms <- source:id\n"
      "fn foo\n"
      "  ret <- source:num\n"
      "  sink:sms <- source:id\n"
      "fn getId\n"
      "  ret <- source:id\n"
      "fn getNumber\n"
      "  ret <- source:num\n";
  return text;
}

}  // namespace dcert::testing
