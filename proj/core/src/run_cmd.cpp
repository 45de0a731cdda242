#include "wise/harness/run_cmd.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "wise/backend/remote.hpp"
#include "wise/backend/scripted.hpp"
#include "wise/errors.hpp"
#include "wise/model/transcript_io.hpp"
#include "wise/protocol/engine.hpp"

namespace wise::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path transcript_path(const RunConfig& cfg, const model::Problem& p) {
  return fs::path(cfg.output_dir) / (p.id + ".transcript.json");
}

bool has_valid_transcript(const fs::path& path) {
  if (!fs::exists(path)) return false;
  try {
    model::read_transcript_file(path.string());
    return true;
  } catch (const Error&) {
    // A corrupt or partial file is rerun, not trusted.
    return false;
  }
}

}  // namespace

backend::BackendRegistry build_registry(const RunConfig& cfg) {
  cfg.validate();
  std::set<std::string> ids;
  for (const auto& b : cfg.roster.solvers) ids.insert(b.backend_id);
  for (const auto& b : cfg.roster.reflectors) ids.insert(b.backend_id);
  ids.insert(cfg.roster.orchestrator.backend_id);

  backend::BackendRegistry registry;
  for (const auto& id : ids) {
    if (id == "scripted") {
      registry.add(id, std::make_shared<backend::ScriptedBackend>(
                           backend::load_replay_file(cfg.replay_path)));
    } else {
      registry.add(id, std::make_shared<backend::RemoteBackend>(id));
    }
  }
  return registry;
}

RunSummary run_batch(const RunConfig& cfg,
                     const std::vector<model::Problem>& problems,
                     backend::BackendRegistry& backends,
                     std::ostream& progress) {
  cfg.validate();
  const bool dataset_has_images =
      std::any_of(problems.begin(), problems.end(),
                  [](const model::Problem& p) { return p.has_images(); });
  cfg.roster.validate(dataset_has_images);
  for (const auto& p : problems) p.validate();
  fs::create_directories(cfg.output_dir);

  RunSummary summary;
  summary.total = static_cast<int>(problems.size());

  std::mutex mu;  // guards progress stream, call log, summary counters
  std::ofstream call_log(fs::path(cfg.output_dir) / "calls.jsonl",
                         std::ios::app);
  std::atomic<long long> calls{0};
  auto log_call = [&](const protocol::CallLogEntry& e) {
    calls.fetch_add(1, std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(mu);
    json j;
    j["problem"] = e.problem_id;
    j["round"] = e.round;
    j["role"] = e.role;
    j["agent"] = e.agent;
    j["latency_ms"] = e.latency_ms;
    j["outcome"] = e.outcome;
    call_log << j.dump() << "\n";
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= problems.size()) return;
      const auto& p = problems[i];
      const auto path = transcript_path(cfg, p);
      if (cfg.resume && has_valid_transcript(path)) {
        std::lock_guard<std::mutex> lock(mu);
        ++summary.skipped;
        progress << p.id << ": skipped (resume)\n";
        continue;
      }
      try {
        auto transcript = protocol::run_debate(p, cfg.roster, cfg.policy,
                                               cfg.prompts, backends, log_call);
        model::write_transcript_file(path.string(), transcript);
        std::lock_guard<std::mutex> lock(mu);
        ++summary.ran;
        if (transcript.termination == model::Termination::BackendFailure) {
          ++summary.failures;
          summary.failed_ids.push_back(p.id);
          progress << p.id << ": backend failure after "
                   << transcript.round_count() << " round(s)\n";
        } else {
          progress << p.id << ": " << model::to_string(transcript.termination)
                   << " in " << transcript.round_count() << " round(s)\n";
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        ++summary.failures;
        summary.failed_ids.push_back(p.id);
        progress << p.id << ": error: " << e.what() << "\n";
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(cfg.policy.parallelism,
                                static_cast<int>(problems.size())));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  summary.backend_calls = calls.load();
  std::sort(summary.failed_ids.begin(), summary.failed_ids.end());
  if (summary.failures > 0) {
    json manifest;
    manifest["failed"] = summary.failed_ids;
    std::ofstream out(fs::path(cfg.output_dir) / "failures.json",
                      std::ios::trunc);
    out << manifest.dump(2) << "\n";
  }
  progress << "done: " << summary.ran << " ran, " << summary.skipped
           << " skipped, " << summary.failures << " failed, "
           << summary.backend_calls << " backend call(s)\n";
  return summary;
}

}  // namespace wise::harness
