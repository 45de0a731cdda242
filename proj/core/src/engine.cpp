#include "wise/protocol/engine.hpp"

#include <chrono>
#include <future>
#include <mutex>
#include <optional>

#include "wise/errors.hpp"
#include "wise/protocol/parsers.hpp"

namespace wise::protocol {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct Logger {
  const CallLogFn& fn;
  std::mutex mu;

  void emit(CallLogEntry entry) {
    if (!fn) return;
    std::lock_guard<std::mutex> lock(mu);
    fn(entry);
  }
};

// Runs one backend call, logs it, and returns the reply, or nullopt after
// BackendFailure. Other exceptions propagate: they indicate bugs or broken
// configuration, not transient agent trouble.
std::optional<std::string> guarded_call(
    backend::BackendRegistry& backends, const model::AgentBinding& binding,
    const backend::CompletionRequest& req, const backend::CallContext& ctx,
    const std::string& problem_id, Logger& logger) {
  CallLogEntry entry;
  entry.problem_id = problem_id;
  entry.round = ctx.round;
  entry.role = ctx.role;
  entry.agent = binding.name;
  const auto start = Clock::now();
  try {
    std::string reply = backends.complete(binding, req, ctx);
    entry.latency_ms = ms_since(start);
    entry.outcome = "ok";
    logger.emit(entry);
    return reply;
  } catch (const BackendFailure&) {
    entry.latency_ms = ms_since(start);
    entry.outcome = "backend_failure";
    logger.emit(entry);
    return std::nullopt;
  }
}

backend::CompletionRequest with_params(backend::CompletionRequest req,
                                       const model::AgentBinding& binding) {
  req.max_tokens = binding.params.max_tokens;
  req.temperature = binding.params.temperature;
  req.seed = binding.params.seed;
  return req;
}

}  // namespace

void DebatePolicy::validate() const {
  if (max_rounds < 1 || max_rounds > 64) {
    throw ConfigError("max_rounds must be in [1, 64]");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

bool check_consensus(const model::DebateRound& round) {
  if (round.responses.empty()) return false;
  const model::AnswerOption& first = round.responses.front().parsed_answer;
  if (first.is_abstain()) return false;
  for (const auto& r : round.responses) {
    if (r.parsed_answer != first) return false;
  }
  for (const auto& row : round.judgments) {
    for (const auto& g : row) {
      if (g.weight != 2) return false;
    }
  }
  return true;
}

std::string orchestrate_feedback(
    const std::vector<model::ReflectorJudgment>& judgments,
    const PromptSet& prompts, const model::AgentBinding& orchestrator,
    backend::BackendRegistry& backends, const backend::CallContext& ctx) {
  std::vector<std::string> feedbacks;
  for (const auto& g : judgments) {
    if (!g.missing()) feedbacks.push_back(g.feedback_text);
  }
  if (feedbacks.empty()) return "";
  backend::CompletionRequest req =
      with_params(build_orchestrator_task(feedbacks, prompts), orchestrator);
  return backends.complete(orchestrator, req, ctx);
}

model::DebateTranscript run_debate(const model::Problem& p,
                                   const model::AgentRoster& roster,
                                   const DebatePolicy& policy,
                                   const PromptSet& prompts,
                                   backend::BackendRegistry& backends,
                                   const CallLogFn& log) {
  p.validate();
  roster.validate(p.has_images());
  policy.validate();
  prompts.validate();
  Logger logger{log, {}};

  const int n = roster.solver_count();
  const int m = roster.reflector_count();

  model::DebateTranscript t;
  t.problem_id = p.id;
  t.roster_fingerprint = roster.fingerprint();
  for (const auto& [code, text] : p.options) t.option_codes.push_back(code);

  for (int k = 1; k <= policy.max_rounds; ++k) {
    model::DebateRound round;
    round.round_index = k;
    const auto round_start = Clock::now();

    // Solver fan-out.
    {
      std::vector<std::future<model::SolverResponse>> futures;
      for (int i = 0; i < n; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i, k] {
          const model::AgentBinding& solver = roster.solvers[i];
          std::optional<std::string> prior, feedback;
          if (k > 1) {
            const model::DebateRound& prev = t.rounds.back();
            prior = prev.responses[i].raw_text;
            feedback = prev.orchestrator_summaries[i];
          }
          backend::CompletionRequest req = with_params(
              build_solver_task(p, k, prior, feedback, prompts), solver);
          if (!solver.vision_capable()) req.image_refs.clear();
          backend::CallContext ctx{"solver", k, i};
          model::SolverResponse r;
          r.round = k;
          r.solver_index = i;
          if (auto reply = guarded_call(backends, solver, req, ctx, p.id,
                                        logger)) {
            r.raw_text = *reply;
            r.parsed_answer = parse_final_answer(*reply, p);
            r.parse_ok = !r.parsed_answer.is_abstain();
          }
          return r;
        }));
      }
      for (auto& f : futures) round.responses.push_back(f.get());
    }

    // Reflector fan-out over all (solver, reflector) pairs.
    {
      std::vector<std::future<model::ReflectorJudgment>> futures;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          futures.push_back(std::async(std::launch::async, [&, i, j, k] {
            const model::AgentBinding& reflector = roster.reflectors[j];
            backend::CompletionRequest req = with_params(
                build_reflector_task(p, round.responses[i], reflector,
                                     prompts),
                reflector);
            backend::CallContext ctx{"reflector", k, i};
            model::ReflectorJudgment g;
            g.round = k;
            g.solver_index = i;
            g.reflector_index = j;
            if (auto reply = guarded_call(backends, reflector, req, ctx, p.id,
                                          logger)) {
              g.weight = parse_final_score(*reply);
              g.feedback_text = *reply;
            }
            return g;
          }));
        }
      }
      round.judgments.assign(n, {});
      auto it = futures.begin();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j, ++it) {
          round.judgments[i].push_back(it->get());
        }
      }
    }

    const bool consensual = check_consensus(round);
    const bool last_round = (k == policy.max_rounds);
    if ((consensual && policy.consensus_stop) || last_round) {
      t.wall_clock_seconds.push_back(
          ms_since(round_start) / 1000.0);
      t.rounds.push_back(std::move(round));
      t.termination = consensual ? model::Termination::Consensus
                                 : model::Termination::MaxRounds;
      break;
    }

    // Orchestrator fan-out; a failure here ends the whole debate.
    bool orchestrator_failed = false;
    {
      std::vector<std::future<std::optional<std::string>>> futures;
      for (int i = 0; i < n; ++i) {
        futures.push_back(
            std::async(std::launch::async,
                       [&, i, k]() -> std::optional<std::string> {
              std::vector<std::string> feedbacks;
              for (const auto& g : round.judgments[i]) {
                if (!g.missing()) feedbacks.push_back(g.feedback_text);
              }
              if (feedbacks.empty()) return std::string();
              backend::CompletionRequest req = with_params(
                  build_orchestrator_task(feedbacks, prompts),
                  roster.orchestrator);
              backend::CallContext ctx{"orchestrator", k, i};
              return guarded_call(backends, roster.orchestrator, req, ctx,
                                  p.id, logger);
            }));
      }
      for (auto& f : futures) {
        if (auto summary = f.get()) {
          round.orchestrator_summaries.push_back(*summary);
        } else {
          orchestrator_failed = true;
          round.orchestrator_summaries.push_back("");
        }
      }
    }

    t.wall_clock_seconds.push_back(ms_since(round_start) / 1000.0);
    if (orchestrator_failed) {
      // Only reachable with consensus_stop off when the round is consensual;
      // a consensual final round stays a Consensus outcome.
      round.orchestrator_summaries.clear();
      t.rounds.push_back(std::move(round));
      t.termination = consensual ? model::Termination::Consensus
                                 : model::Termination::BackendFailure;
      break;
    }
    t.rounds.push_back(std::move(round));
  }

  t.validate();
  return t;
}

}  // namespace wise::protocol
