#include "dcert/tamper.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "dcert/analyzer.hpp"
#include "dcert/checker.hpp"

namespace dcert {

std::string_view mutation_kind_name(MutationKind kind) {
  switch (kind) {
    case MutationKind::DropPair: return "DropPair";
    case MutationKind::DropPairEverywhere: return "DropPairEverywhere";
    case MutationKind::DropEntry: return "DropEntry";
    case MutationKind::DropAllEntries: return "DropAllEntries";
    case MutationKind::AddSpuriousPair: return "AddSpuriousPair";
    case MutationKind::AddSinkCall: return "AddSinkCall";
  }
  return "Unknown";
}

namespace {

Summary& entry_at(Certificate& certificate, const std::string& function) {
  auto it = certificate.entries.find(function);
  if (it == certificate.entries.end()) {
    throw std::invalid_argument("no certificate entry for '" + function + "'");
  }
  return it->second;
}

bool mentions(const FlowPair& pair, const std::string& label) {
  return (pair.origin.is_source() && pair.origin.text == label) ||
         (pair.target.is_sink() && pair.target.label == label);
}

}  // namespace

Certificate mutate_certificate(const Certificate& certificate, const Mutation& mutation) {
  Certificate out = certificate;
  switch (mutation.kind) {
    case MutationKind::DropPair: {
      if (!mutation.pair) throw std::invalid_argument("DropPair requires a pair locus");
      Summary& entry = entry_at(out, mutation.function);
      if (entry.pairs.erase(*mutation.pair) == 0) {
        throw std::invalid_argument("pair " + render(*mutation.pair) + " not present in '" +
                                    mutation.function + "'");
      }
      return out;
    }
    case MutationKind::DropPairEverywhere: {
      std::size_t erased = 0;
      for (auto& [name, summary] : out.entries) {
        for (auto it = summary.pairs.begin(); it != summary.pairs.end();) {
          if (mentions(*it, mutation.label)) {
            it = summary.pairs.erase(it);
            ++erased;
          } else {
            ++it;
          }
        }
      }
      if (erased == 0) {
        throw std::invalid_argument("no pair mentions label '" + mutation.label + "'");
      }
      return out;
    }
    case MutationKind::DropEntry: {
      entry_at(out, mutation.function).pairs.clear();
      return out;
    }
    case MutationKind::DropAllEntries: {
      out.entries.clear();
      return out;
    }
    case MutationKind::AddSpuriousPair: {
      if (!mutation.pair) throw std::invalid_argument("AddSpuriousPair requires a pair");
      Summary& entry = entry_at(out, mutation.function);
      if (!entry.insert(*mutation.pair)) {
        throw std::invalid_argument("pair " + render(*mutation.pair) + " already present in '" +
                                    mutation.function + "'");
      }
      return out;
    }
    case MutationKind::AddSinkCall:
      throw std::invalid_argument("AddSinkCall mutates the program, not the certificate");
  }
  throw std::invalid_argument("unknown mutation kind");
}

Program mutate_program(const Program& program, const Mutation& mutation) {
  if (mutation.kind != MutationKind::AddSinkCall) {
    throw std::invalid_argument("only AddSinkCall mutates the program");
  }
  const Function& original = program.require(mutation.function);

  std::set<std::string> holders = assigned_variables(original.body);
  holders.insert(original.params.begin(), original.params.end());
  if (!holders.count(mutation.variable)) {
    throw std::invalid_argument("variable '" + mutation.variable + "' never holds a value in '" +
                                mutation.function + "'");
  }
  if (mutation.sink_api.empty()) {
    throw std::invalid_argument("AddSinkCall requires a sink API name");
  }

  std::size_t last_return = original.body.size();
  for (std::size_t i = 0; i < original.body.size(); ++i) {
    if (original.body[i].as<ReturnStmt>()) last_return = i;
  }
  if (last_return == original.body.size()) {
    throw std::invalid_argument("function '" + mutation.function + "' has no top-level return");
  }

  Program out = program;
  Function& fn = out.functions[out.index.at(mutation.function)];
  CallStmt call;
  call.callee = mutation.sink_api;
  call.args.push_back(mutation.variable);
  fn.body.insert(fn.body.begin() + static_cast<std::ptrdiff_t>(last_return),
                 Stmt{std::move(call)});
  return out;
}

namespace {

struct SuiteContext {
  const Program& program;
  const PolicySpec& spec;
  const Certificate& genuine;

  bool self_recursive(const std::string& name) const {
    return callees_of(program, name).count(name) != 0;
  }

  std::string detected_or_accepted(const Program& p, const Certificate& c) const {
    CheckReport report = check(p, spec, c, /*strict=*/false);
    return report.certificate_valid ? "ACCEPTED" : "DETECTED";
  }
};

TamperRow row_drop_pair(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::DropPair};
  row.expected = "DETECTED";

  // The deepest-propagated pair: present in the most entries, so the drop
  // must be discovered by recomputation rather than by a trivial diff.
  std::map<FlowPair, std::vector<std::string>> occurrences;
  for (const auto& [name, summary] : ctx.genuine.entries) {
    for (const FlowPair& pair : summary.pairs) occurrences[pair].push_back(name);
  }
  const FlowPair* chosen = nullptr;
  std::size_t best = 0;
  for (const auto& [pair, functions] : occurrences) {
    if (functions.size() > best) {
      best = functions.size();
      chosen = &pair;
    }
  }
  if (!chosen) {
    row.description = "no pairs in the certificate";
    row.ok = true;
    return row;
  }
  row.applicable = true;
  Certificate mutated = ctx.genuine;
  std::string where;
  for (const std::string& name : occurrences[*chosen]) {
    mutated = mutate_certificate(mutated, Mutation{.kind = MutationKind::DropPair, .function = name, .pair = *chosen});
    if (!where.empty()) where += ", ";
    where += name;
  }
  row.description = "pair " + render(*chosen) + " removed from: " + where;
  row.observed = ctx.detected_or_accepted(ctx.program, mutated);
  row.ok = row.observed == row.expected;
  return row;
}

TamperRow row_drop_label(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::DropPairEverywhere};
  row.expected = "DETECTED";

  std::set<std::string> labels;
  for (const auto& [name, summary] : ctx.genuine.entries) {
    for (const FlowPair& pair : summary.pairs) {
      if (pair.origin.is_source()) labels.insert(pair.origin.text);
    }
  }
  if (labels.empty()) {
    row.description = "no source label occurs in the certificate";
    row.ok = true;
    return row;
  }
  row.applicable = true;
  const std::string& label = *labels.begin();
  Mutation mutation{.kind = MutationKind::DropPairEverywhere};
  mutation.label = label;
  Certificate mutated = mutate_certificate(ctx.genuine, mutation);
  row.description = "every pair mentioning source label '" + label + "' removed";
  row.observed = ctx.detected_or_accepted(ctx.program, mutated);
  row.ok = row.observed == row.expected;
  return row;
}

TamperRow row_drop_entry(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::DropEntry};
  row.expected = "DETECTED";

  const std::string* chosen = nullptr;
  std::size_t best = 0;
  for (const auto& [name, summary] : ctx.genuine.entries) {
    if (summary.empty() || ctx.self_recursive(name)) continue;
    if (summary.size() > best) {
      best = summary.size();
      chosen = &name;
    }
  }
  if (!chosen) {
    row.description = "no non-recursive function with a non-empty summary";
    row.ok = true;
    return row;
  }
  row.applicable = true;
  Mutation mutation{.kind = MutationKind::DropEntry};
  mutation.function = *chosen;
  Certificate mutated = mutate_certificate(ctx.genuine, mutation);
  row.description = "entry '" + *chosen + "' emptied";
  row.observed = ctx.detected_or_accepted(ctx.program, mutated);
  row.ok = row.observed == row.expected;
  return row;
}

TamperRow row_drop_all(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::DropAllEntries};
  row.expected = "DETECTED";
  if (ctx.program.functions.empty()) {
    row.description = "program defines no functions";
    row.ok = true;
    return row;
  }
  row.applicable = true;
  Certificate mutated = mutate_certificate(ctx.genuine, Mutation{.kind = MutationKind::DropAllEntries});
  row.description = "all " + std::to_string(ctx.genuine.entries.size()) + " entries removed";
  row.observed = ctx.detected_or_accepted(ctx.program, mutated);
  row.ok = row.observed == row.expected;
  return row;
}

TamperRow row_add_spurious(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::AddSpuriousPair};
  row.expected = "ACCEPTED (non-strict) / DETECTED (strict)";

  // A root keeps the padded certificate a post-fixpoint: no caller's
  // recomputation can observe the extra pair.
  std::set<std::string> roots = roots_of(ctx.program);
  const Function* fn = nullptr;
  for (const std::string& name : roots) {
    if (!ctx.self_recursive(name)) {
      fn = &ctx.program.require(name);
      break;
    }
  }
  if (!fn) {
    row.description = "no non-recursive root function";
    row.ok = true;
    return row;
  }

  std::vector<FlowTarget> targets{FlowTarget::ret()};
  std::set<std::string> sink_labels;
  for (const auto& [api, label] : ctx.spec.sinks) sink_labels.insert(label);
  for (const std::string& label : sink_labels) targets.push_back(FlowTarget::sink(label));
  std::vector<FlowOrigin> origins;
  std::set<std::string> params(fn->params.begin(), fn->params.end());
  for (const std::string& p : params) origins.push_back(FlowOrigin::param(p));
  std::set<std::string> source_labels;
  for (const auto& [api, label] : ctx.spec.sources) source_labels.insert(label);
  for (const std::string& label : source_labels) origins.push_back(FlowOrigin::source(label));

  const Summary& entry = ctx.genuine.entries.at(fn->name);
  std::optional<FlowPair> spurious;
  for (const FlowTarget& target : targets) {
    for (const FlowOrigin& origin : origins) {
      FlowPair candidate{target, origin};
      if (!entry.contains(candidate)) {
        spurious = candidate;
        break;
      }
    }
    if (spurious) break;
  }
  if (!spurious) {
    row.description = "root entry already carries every well-formed pair";
    row.ok = true;
    return row;
  }

  row.applicable = true;
  Mutation mutation{.kind = MutationKind::AddSpuriousPair, .function = fn->name, .pair = *spurious};
  Certificate mutated = mutate_certificate(ctx.genuine, mutation);
  row.description = "pair " + render(*spurious) + " added to '" + fn->name + "'";
  CheckReport lax = check(ctx.program, ctx.spec, mutated, /*strict=*/false);
  CheckReport strict = check(ctx.program, ctx.spec, mutated, /*strict=*/true);
  row.observed = std::string(lax.certificate_valid ? "ACCEPTED" : "DETECTED") +
                 " (non-strict) / " + (strict.certificate_valid ? "ACCEPTED" : "DETECTED") +
                 " (strict)";
  row.ok = row.observed == row.expected;
  return row;
}

TamperRow row_add_sink_call(const SuiteContext& ctx) {
  TamperRow row{.kind = MutationKind::AddSinkCall};
  row.expected = "DETECTED";
  if (ctx.spec.sinks.empty()) {
    row.description = "policy declares no sink";
    row.ok = true;
    return row;
  }
  const std::string& sink_api = ctx.spec.sinks.begin()->first;

  // First function (by name) with a taint-carrying variable whose leak the
  // stale certificate does not already admit.
  for (const auto& [name, entry] : ctx.genuine.entries) {
    const Function& fn = ctx.program.require(name);
    bool has_return = false;
    for (const Stmt& stmt : fn.body) {
      if (stmt.as<ReturnStmt>()) has_return = true;
    }
    if (!has_return) continue;
    std::set<std::string> variables = assigned_variables(fn.body);
    variables.insert(fn.params.begin(), fn.params.end());
    for (const std::string& variable : variables) {
      Mutation mutation{.kind = MutationKind::AddSinkCall, .function = name};
      mutation.variable = variable;
      mutation.sink_api = sink_api;
      Program mutated = mutate_program(ctx.program, mutation);
      Summary recomputed =
          analyze_function(mutated, mutated.require(name), ctx.spec, ctx.genuine.entries);
      if (is_subset(recomputed, entry)) continue;  // edit invisible to the certificate
      row.applicable = true;
      row.description = "call " + sink_api + "(" + variable + ") inserted before final return of '" +
                        name + "'";
      row.observed = ctx.detected_or_accepted(mutated, ctx.genuine);
      row.ok = row.observed == row.expected;
      return row;
    }
  }
  row.description = "no code edit can force a pair the certificate lacks";
  row.ok = true;
  return row;
}

}  // namespace

TamperSuiteResult run_tamper_suite(const Program& program, const PolicySpec& spec) {
  Certificate genuine = analyze_program(program, spec).certificate;
  SuiteContext ctx{program, spec, genuine};

  TamperSuiteResult result;
  result.rows.push_back(row_drop_pair(ctx));
  result.rows.push_back(row_drop_label(ctx));
  result.rows.push_back(row_drop_entry(ctx));
  result.rows.push_back(row_drop_all(ctx));
  result.rows.push_back(row_add_spurious(ctx));
  result.rows.push_back(row_add_sink_call(ctx));
  result.all_ok = std::all_of(result.rows.begin(), result.rows.end(),
                              [](const TamperRow& row) { return row.ok; });
  return result;
}

std::string render(const TamperSuiteResult& result) {
  std::ostringstream os;
  for (const TamperRow& row : result.rows) {
    os << mutation_kind_name(row.kind);
    for (std::size_t i = mutation_kind_name(row.kind).size(); i < 20; ++i) os << ' ';
    if (!row.applicable) {
      os << "N/A        " << row.description << '\n';
      continue;
    }
    os << row.observed << "  " << row.description << '\n';
  }
  os << "TAMPER-SUITE: " << (result.all_ok ? "OK" : "FAILED") << '\n';
  return os.str();
}

}  // namespace dcert
