#include "dcert/analyzer.hpp"

#include <atomic>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace dcert {

namespace {

std::atomic<std::uint64_t> g_invocations{0};

void collect_atoms(const StmtList& body, std::vector<const Stmt*>& out) {
  for (const Stmt& stmt : body) {
    if (const auto* s = stmt.as<IfStmt>()) {
      collect_atoms(s->then_body, out);
      collect_atoms(s->else_body, out);
    } else if (const auto* s = stmt.as<WhileStmt>()) {
      collect_atoms(s->body, out);
    } else {
      out.push_back(&stmt);
    }
  }
}

const std::set<FlowOrigin>* lookup(const TaintEnv& env, const std::string& var) {
  auto it = env.find(var);
  return it == env.end() ? nullptr : &it->second;
}

bool merge_into(std::set<FlowOrigin>& dst, const std::set<FlowOrigin>& src) {
  bool changed = false;
  for (const FlowOrigin& origin : src) {
    changed |= dst.insert(origin).second;
  }
  return changed;
}

std::set<FlowOrigin> args_taint(const TaintEnv& env, const std::vector<std::string>& args) {
  std::set<FlowOrigin> taint;
  for (const std::string& arg : args) {
    if (const auto* origins = lookup(env, arg)) {
      taint.insert(origins->begin(), origins->end());
    }
  }
  return taint;
}

struct LocalAnalysis {
  const Program& program;
  const PolicySpec& spec;
  const SummaryMap& callees;
  TaintEnv env;
  Summary emitted;

  bool apply(const Stmt& stmt) {
    if (const auto* s = stmt.as<CopyStmt>()) {
      return assign_union(s->dst, {s->src});
    }
    if (stmt.as<ConstStmt>()) {
      return false;  // constants carry no taint, and assignment never kills
    }
    if (const auto* s = stmt.as<BinopStmt>()) {
      return assign_union(s->dst, {s->lhs, s->rhs});
    }
    if (const auto* s = stmt.as<ReturnStmt>()) {
      bool changed = false;
      if (s->value) {
        if (const auto* origins = lookup(env, *s->value)) {
          for (const FlowOrigin& origin : *origins) {
            changed |= emitted.insert({FlowTarget::ret(), origin});
          }
        }
      }
      return changed;
    }
    const auto* call = stmt.as<CallStmt>();
    assert(call && "blocks are flattened before transfer");
    return apply_call(*call);
  }

 private:
  bool assign_union(const std::string& dst, std::initializer_list<std::string> reads) {
    std::set<FlowOrigin> incoming;
    for (const std::string& var : reads) {
      if (const auto* origins = lookup(env, var)) {
        incoming.insert(origins->begin(), origins->end());
      }
    }
    if (incoming.empty()) return false;
    return merge_into(env[dst], incoming);
  }

  bool apply_call(const CallStmt& call) {
    Classification cls = classify_callee(spec, program, call.callee);
    switch (cls.kind) {
      case CalleeKind::Source: {
        if (!call.dst) return false;
        std::set<FlowOrigin> incoming = args_taint(env, call.args);
        incoming.insert(FlowOrigin::source(cls.label));
        return merge_into(env[*call.dst], incoming);
      }
      case CalleeKind::Sink: {
        bool changed = false;
        for (const std::string& arg : call.args) {
          if (const auto* origins = lookup(env, arg)) {
            for (const FlowOrigin& origin : *origins) {
              changed |= emitted.insert({FlowTarget::sink(cls.label), origin});
            }
          }
        }
        if (call.dst) {
          std::set<FlowOrigin> incoming = args_taint(env, call.args);
          if (!incoming.empty()) changed |= merge_into(env[*call.dst], incoming);
        }
        return changed;
      }
      case CalleeKind::ExternalUnknown: {
        if (!call.dst) return false;
        std::set<FlowOrigin> incoming = args_taint(env, call.args);
        if (incoming.empty()) return false;
        return merge_into(env[*call.dst], incoming);
      }
      case CalleeKind::Internal:
        return apply_internal_call(call);
    }
    return false;
  }

  bool apply_internal_call(const CallStmt& call) {
    const Function& callee = program.require(call.callee);
    assert(callee.params.size() == call.args.size() && "arity is checked at parse time");
    auto it = callees.find(call.callee);
    if (it == callees.end()) {
      throw std::invalid_argument("missing callee summary for '" + call.callee + "'");
    }
    const Summary& summary = it->second;

    auto param_index = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < callee.params.size(); ++i) {
        if (callee.params[i] == name) return i;
      }
      throw std::invalid_argument("summary for '" + call.callee +
                                  "' names unknown parameter '" + name + "'");
    };

    bool changed = false;
    std::set<FlowOrigin> result_taint;
    for (const FlowPair& pair : summary.pairs) {
      if (pair.target.is_ret()) {
        if (!call.dst) continue;
        if (pair.origin.is_param()) {
          const std::string& arg = call.args[param_index(pair.origin.text)];
          if (const auto* origins = lookup(env, arg)) {
            result_taint.insert(origins->begin(), origins->end());
          }
        } else {
          result_taint.insert(pair.origin);
        }
      } else {
        if (pair.origin.is_param()) {
          const std::string& arg = call.args[param_index(pair.origin.text)];
          if (const auto* origins = lookup(env, arg)) {
            for (const FlowOrigin& origin : *origins) {
              changed |= emitted.insert({pair.target, origin});
            }
          }
        } else {
          changed |= emitted.insert(pair);
        }
      }
    }
    if (call.dst && !result_taint.empty()) {
      changed |= merge_into(env[*call.dst], result_taint);
    }
    return changed;
  }
};

std::map<std::string, std::set<std::string>> caller_map(const Program& program) {
  std::map<std::string, std::set<std::string>> callers;
  for (const Function& fn : program.functions) {
    for (const std::string& callee : callees_of(program, fn.name)) {
      if (program.find(callee)) callers[callee].insert(fn.name);
    }
  }
  return callers;
}

SummaryMap empty_map(const Program& program) {
  SummaryMap map;
  for (const Function& fn : program.functions) map[fn.name];
  return map;
}

/// Height of the product lattice plus one: no Jacobi run may need more
/// rounds than one change per addable pair plus the stabilizing round.
std::size_t round_bound(const Program& program, const PolicySpec& spec) {
  std::size_t sinks = spec.sinks.size();
  std::size_t sources = spec.sources.size();
  std::size_t bound = 1;
  for (const Function& fn : program.functions) {
    bound += (sinks + 1) * (sources + fn.params.size());
  }
  return bound;
}

/// Worklist engine. With `floor` null this computes the least fixpoint from
/// `map`; with `floor` set it computes the least post-fixpoint containing
/// `floor` (every recomputation is joined with the floor entry, so seeded
/// pairs survive).
SummaryMap run_worklist(const Program& program, const PolicySpec& spec, SummaryMap map,
                        const SummaryMap* floor) {
  auto callers = caller_map(program);
  std::deque<std::string> queue;
  std::set<std::string> queued;
  // Reverse source order: callees defined later than their callers settle
  // first, which keeps deep call chains close to a single pass.
  for (auto it = program.functions.rbegin(); it != program.functions.rend(); ++it) {
    queue.push_back(it->name);
    queued.insert(it->name);
  }
  while (!queue.empty()) {
    std::string name = std::move(queue.front());
    queue.pop_front();
    queued.erase(name);
    Summary next = analyze_function(program, program.require(name), spec, map);
    if (floor) next = join(std::move(next), floor->at(name));
    Summary& current = map[name];
    if (next == current) continue;
    current = std::move(next);
    auto it = callers.find(name);
    if (it == callers.end()) continue;
    for (const std::string& caller : it->second) {
      if (queued.insert(caller).second) queue.push_back(caller);
    }
  }
  return map;
}

}  // namespace

Summary analyze_function(const Program& program, const Function& function,
                         const PolicySpec& spec, const SummaryMap& callee_summaries) {
  g_invocations.fetch_add(1, std::memory_order_relaxed);

  LocalAnalysis local{program, spec, callee_summaries, {}, {}};
  for (const std::string& param : function.params) {
    local.env[param].insert(FlowOrigin::param(param));
  }
  std::vector<const Stmt*> atoms;
  collect_atoms(function.body, atoms);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Stmt* stmt : atoms) {
      changed |= local.apply(*stmt);
    }
  }
  return std::move(local.emitted);
}

AnalysisResult analyze_program(const Program& program, const PolicySpec& spec,
                               FixpointMode mode) {
  AnalysisResult result;
  if (mode == FixpointMode::Worklist) {
    result.certificate.entries = run_worklist(program, spec, empty_map(program), nullptr);
    return result;
  }

  // Jacobi: every round recomputes all functions from the previous round's
  // frozen map; the recorded rounds reproduce the iteration table column by
  // column, final round repeating the stabilized one.
  SummaryMap previous = empty_map(program);
  result.rounds.push_back(previous);
  std::size_t bound = round_bound(program, spec);
  for (std::size_t round = 1;; ++round) {
    if (round > bound) {
      throw std::logic_error("fixpoint exceeded its lattice-height round bound");
    }
    SummaryMap next;
    for (const Function& fn : program.functions) {
      next[fn.name] = analyze_function(program, fn, spec, previous);
    }
    result.rounds.push_back(next);
    if (next == previous) break;
    previous = std::move(next);
  }
  result.certificate.entries = result.rounds.back();
  return result;
}

SummaryMap close_summaries(const Program& program, const PolicySpec& spec, SummaryMap start) {
  for (const Function& fn : program.functions) {
    if (!start.count(fn.name)) {
      throw std::invalid_argument("close_summaries: missing entry for '" + fn.name + "'");
    }
  }
  SummaryMap floor = start;
  return run_worklist(program, spec, std::move(start), &floor);
}

std::uint64_t analyze_function_invocations() {
  return g_invocations.load(std::memory_order_relaxed);
}

}  // namespace dcert
