#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wise/backend/completion.hpp"
#include "wise/harness/config.hpp"
#include "wise/model/types.hpp"

namespace wise::harness {

struct RunSummary {
  int total = 0;
  int ran = 0;
  int skipped = 0;    // resumed from an existing transcript
  int failures = 0;   // BackendFailure terminations or thrown errors
  long long backend_calls = 0;
  std::vector<std::string> failed_ids;

  int exit_code() const { return failures > 0 ? 1 : 0; }
};

// Builds the backend registry the roster needs: "scripted" replays
// cfg.replay_path (ConfigError when unset), any other id becomes a remote
// backend resolved from the environment.
backend::BackendRegistry build_registry(const RunConfig& cfg);

// Debates every problem without a stored transcript, writing each result
// atomically to <output_dir>/<id>.json plus a call log (calls.jsonl) and,
// when anything failed, a failure manifest (failures.json). Problems run on
// a bounded worker pool of cfg.policy.parallelism threads; one progress line
// per problem goes to `progress`. With cfg.resume, existing readable
// transcripts are skipped, so a second run over a complete directory makes
// zero backend calls.
RunSummary run_batch(const RunConfig& cfg,
                     const std::vector<model::Problem>& problems,
                     backend::BackendRegistry& backends, std::ostream& progress);

}  // namespace wise::harness
