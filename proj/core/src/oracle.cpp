#include "dcert/oracle.hpp"

#include <cassert>
#include <stdexcept>

namespace dcert {

namespace {

struct DepthExceeded {};

using Rename = std::map<std::string, std::string>;

std::string mapped(const Rename& rename, const std::string& name) {
  auto it = rename.find(name);
  return it == rename.end() ? name : it->second;
}

/// Expands internal calls into the caller, giving every inlined frame a
/// fresh "@<n>." variable prefix that cannot collide with parsed names.
/// Returns of inlined frames become copies into the frame's "@<n>.ret";
/// only the top-level function keeps real return statements.
class Inliner {
 public:
  Inliner(const Program& program, int depth_limit)
      : program_(program), depth_limit_(depth_limit) {}

  StmtList expand(const Function& fn) {
    return expand_body(fn.body, Rename{}, depth_limit_, nullptr);
  }

 private:
  StmtList expand_body(const StmtList& body, const Rename& rename, int depth,
                       const std::string* ret_var) {
    StmtList out;
    for (const Stmt& stmt : body) {
      if (const auto* s = stmt.as<CopyStmt>()) {
        out.push_back(Stmt{CopyStmt{mapped(rename, s->dst), mapped(rename, s->src)}});
      } else if (const auto* s = stmt.as<ConstStmt>()) {
        out.push_back(Stmt{ConstStmt{mapped(rename, s->dst)}});
      } else if (const auto* s = stmt.as<BinopStmt>()) {
        out.push_back(Stmt{BinopStmt{mapped(rename, s->dst), mapped(rename, s->lhs),
                                     mapped(rename, s->rhs)}});
      } else if (const auto* s = stmt.as<ReturnStmt>()) {
        if (!ret_var) {
          ReturnStmt ret;
          if (s->value) ret.value = mapped(rename, *s->value);
          out.push_back(Stmt{std::move(ret)});
        } else if (s->value) {
          out.push_back(Stmt{CopyStmt{*ret_var, mapped(rename, *s->value)}});
        }
      } else if (const auto* s = stmt.as<IfStmt>()) {
        IfStmt expanded;
        expanded.cond = mapped(rename, s->cond);
        expanded.then_body = expand_body(s->then_body, rename, depth, ret_var);
        expanded.else_body = expand_body(s->else_body, rename, depth, ret_var);
        out.push_back(Stmt{std::move(expanded)});
      } else if (const auto* s = stmt.as<WhileStmt>()) {
        WhileStmt expanded;
        expanded.cond = mapped(rename, s->cond);
        expanded.body = expand_body(s->body, rename, depth, ret_var);
        out.push_back(Stmt{std::move(expanded)});
      } else if (const auto* s = stmt.as<CallStmt>()) {
        expand_call(*s, rename, depth, out);
      }
    }
    return out;
  }

  void expand_call(const CallStmt& call, const Rename& rename, int depth, StmtList& out) {
    if (!program_.find(call.callee)) {
      CallStmt renamed;
      if (call.dst) renamed.dst = mapped(rename, *call.dst);
      renamed.callee = call.callee;
      for (const std::string& arg : call.args) renamed.args.push_back(mapped(rename, arg));
      out.push_back(Stmt{std::move(renamed)});
      return;
    }
    if (depth == 0) throw DepthExceeded{};

    const Function& callee = program_.require(call.callee);
    std::string prefix = "@" + std::to_string(fresh_++) + ".";
    Rename child;
    for (const std::string& param : callee.params) child[param] = prefix + param;
    for (const std::string& var : assigned_variables(callee.body)) child[var] = prefix + var;

    assert(callee.params.size() == call.args.size());
    for (std::size_t i = 0; i < callee.params.size(); ++i) {
      out.push_back(Stmt{CopyStmt{child.at(callee.params[i]), mapped(rename, call.args[i])}});
    }
    std::string ret_var = prefix + "ret";
    StmtList body = expand_body(callee.body, child, depth - 1, &ret_var);
    out.insert(out.end(), std::make_move_iterator(body.begin()),
               std::make_move_iterator(body.end()));
    if (call.dst) {
      out.push_back(Stmt{CopyStmt{mapped(rename, *call.dst), ret_var}});
    }
  }

  const Program& program_;
  int depth_limit_;
  int fresh_ = 0;
};

using Env = std::map<std::string, std::set<FlowOrigin>>;
using EnvSet = std::set<Env>;

constexpr std::size_t kEnvSetCap = 1u << 17;

/// Collecting interpreter over sets of flow-sensitive environments. An If
/// contributes the then-paths, the else-paths and the skip-path; a While
/// contributes every iteration count until the set of loop-head environments
/// closes. Returns terminate their path after emitting.
class PathInterp {
 public:
  PathInterp(const Program& program, const PolicySpec& spec)
      : program_(program), spec_(spec) {}

  std::set<FlowPair> run(const Function& fn, const StmtList& body) {
    Env init;
    for (const std::string& param : fn.params) {
      init[param] = {FlowOrigin::param(param)};
    }
    run_seq(body, EnvSet{std::move(init)});
    return std::move(emitted_);
  }

 private:
  EnvSet run_seq(const StmtList& body, EnvSet envs) {
    for (const Stmt& stmt : body) {
      envs = run_stmt(stmt, std::move(envs));
      if (envs.empty()) break;  // every path returned
    }
    return envs;
  }

  EnvSet run_stmt(const Stmt& stmt, EnvSet envs) {
    if (const auto* s = stmt.as<IfStmt>()) {
      EnvSet out = envs;  // the whole conditional may be skipped
      merge(out, run_seq(s->then_body, envs));
      merge(out, run_seq(s->else_body, std::move(envs)));
      return out;
    }
    if (const auto* s = stmt.as<WhileStmt>()) {
      EnvSet processed;
      EnvSet frontier = std::move(envs);
      while (true) {
        EnvSet fresh;
        for (const Env& env : frontier) {
          if (!processed.count(env)) fresh.insert(env);
        }
        if (fresh.empty()) break;
        merge(processed, fresh);
        frontier = run_seq(s->body, std::move(fresh));
      }
      return processed;
    }
    EnvSet out;
    for (const Env& env : envs) {
      if (std::optional<Env> next = apply_atomic(stmt, env)) {
        out.insert(std::move(*next));
        if (out.size() > kEnvSetCap) {
          throw std::runtime_error("oracle path explosion; shrink the input");
        }
      }
    }
    return out;
  }

  void merge(EnvSet& into, EnvSet from) {
    into.insert(std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
    if (into.size() > kEnvSetCap) {
      throw std::runtime_error("oracle path explosion; shrink the input");
    }
  }

  static std::set<FlowOrigin> read(const Env& env, const std::string& var) {
    auto it = env.find(var);
    return it == env.end() ? std::set<FlowOrigin>{} : it->second;
  }

  static void write(Env& env, const std::string& var, std::set<FlowOrigin> taint) {
    if (taint.empty()) {
      env.erase(var);  // empty and absent are one state, keeping env sets small
    } else {
      env[var] = std::move(taint);
    }
  }

  std::set<FlowOrigin> args_taint(const Env& env, const std::vector<std::string>& args) {
    std::set<FlowOrigin> taint;
    for (const std::string& arg : args) {
      auto it = env.find(arg);
      if (it != env.end()) taint.insert(it->second.begin(), it->second.end());
    }
    return taint;
  }

  std::optional<Env> apply_atomic(const Stmt& stmt, Env env) {
    if (const auto* s = stmt.as<CopyStmt>()) {
      write(env, s->dst, read(env, s->src));
      return env;
    }
    if (const auto* s = stmt.as<ConstStmt>()) {
      write(env, s->dst, {});
      return env;
    }
    if (const auto* s = stmt.as<BinopStmt>()) {
      std::set<FlowOrigin> taint = read(env, s->lhs);
      std::set<FlowOrigin> rhs = read(env, s->rhs);
      taint.insert(rhs.begin(), rhs.end());
      write(env, s->dst, std::move(taint));
      return env;
    }
    if (const auto* s = stmt.as<ReturnStmt>()) {
      if (s->value) {
        for (const FlowOrigin& origin : read(env, *s->value)) {
          emitted_.insert({FlowTarget::ret(), origin});
        }
      }
      return std::nullopt;
    }
    const auto* call = stmt.as<CallStmt>();
    assert(call && "internal calls are inlined before interpretation");
    Classification cls = classify_callee(spec_, program_, call->callee);
    assert(cls.kind != CalleeKind::Internal);
    switch (cls.kind) {
      case CalleeKind::Source: {
        if (call->dst) {
          std::set<FlowOrigin> taint = args_taint(env, call->args);
          taint.insert(FlowOrigin::source(cls.label));
          write(env, *call->dst, std::move(taint));
        }
        break;
      }
      case CalleeKind::Sink: {
        for (const std::string& arg : call->args) {
          for (const FlowOrigin& origin : read(env, arg)) {
            emitted_.insert({FlowTarget::sink(cls.label), origin});
          }
        }
        if (call->dst) {
          write(env, *call->dst, args_taint(env, call->args));
        }
        break;
      }
      default: {
        if (call->dst) {
          write(env, *call->dst, args_taint(env, call->args));
        }
        break;
      }
    }
    return env;
  }

  const Program& program_;
  const PolicySpec& spec_;
  std::set<FlowPair> emitted_;
};

}  // namespace

OracleResult enumerate_flows(const Program& program, const PolicySpec& spec, int depth_limit) {
  if (depth_limit <= 0) throw std::invalid_argument("depth_limit must be positive");
  OracleResult result;
  for (const Function& fn : program.functions) {
    FunctionFlows& flows = result.flows[fn.name];
    try {
      Inliner inliner(program, depth_limit);
      StmtList body = inliner.expand(fn);
      PathInterp interp(program, spec);
      flows.pairs = interp.run(fn, body);
    } catch (const DepthExceeded&) {
      flows = FunctionFlows{true, {}};
    }
  }
  return result;
}

OracleComparison compare(const Certificate& certificate, const OracleResult& oracle) {
  if (certificate.entries.size() != oracle.flows.size()) {
    throw std::invalid_argument("certificate and oracle cover different function sets");
  }
  bool all_exact = true;
  for (const auto& [name, flows] : oracle.flows) {
    auto it = certificate.entries.find(name);
    if (it == certificate.entries.end()) {
      throw std::invalid_argument("certificate and oracle cover different function sets");
    }
    if (flows.inconclusive) {
      all_exact = false;
      continue;
    }
    for (const FlowPair& pair : flows.pairs) {
      if (!it->second.contains(pair)) {
        return {OracleVerdict::Unsound, std::make_pair(name, pair)};
      }
    }
    if (flows.pairs != it->second.pairs) all_exact = false;
  }
  return {all_exact ? OracleVerdict::Exact : OracleVerdict::Sound, std::nullopt};
}

}  // namespace dcert
