// wise: run debates, aggregate stored transcripts, simulate the EM stack
// against synthetic agents, and render reports.
//
// Exit codes: 0 success, 1 partial failure, 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wise/aggregate/calibration.hpp"
#include "wise/errors.hpp"
#include "wise/harness/aggregate_cmd.hpp"
#include "wise/harness/config.hpp"
#include "wise/harness/dataset.hpp"
#include "wise/harness/metrics.hpp"
#include "wise/harness/report_cmd.hpp"
#include "wise/harness/run_cmd.hpp"
#include "wise/harness/simulate_cmd.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wise::ConfigError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_run(const wise::harness::RunConfig& cfg) {
  cfg.validate();
  const auto problems = wise::harness::load_dataset(cfg.dataset_path);
  auto backends = wise::harness::build_registry(cfg);
  const auto summary =
      wise::harness::run_batch(cfg, problems, backends, std::cout);
  return summary.exit_code();
}

int cmd_aggregate(const wise::harness::RunConfig& cfg, const std::string& dir) {
  const auto problems = wise::harness::load_dataset(cfg.dataset_path);

  wise::harness::AggregateOptions opts;
  opts.flags = cfg.aggregation;
  opts.label = cfg.fingerprint();
  const auto result = wise::harness::aggregate_directory(dir, problems, opts);

  // Outputs land in a subdirectory so a later aggregate pass over `dir`
  // does not pick them up as transcripts.
  const std::string name = wise::harness::to_string(cfg.aggregation.aggregator);
  const fs::path out = fs::path(dir) / "reports";
  fs::create_directories(out);
  const std::string agg_path = (out / ("aggregate-" + name + ".json")).string();
  const std::string met_path = (out / ("metrics-" + name + ".json")).string();
  wise::harness::write_aggregation_file(agg_path, result);
  wise::harness::write_metrics_file(met_path, result.metrics);

  const auto& m = result.metrics;
  std::cout << std::fixed << std::setprecision(4);
  std::cout << name << ": accuracy " << m.accuracy << " (" << m.scored_count
            << " scored of " << m.problem_count << " problems), mean rounds "
            << std::setprecision(2) << m.mean_rounds << ", backend calls "
            << m.backend_calls << '\n';
  std::cout << "wrote " << agg_path << '\n';
  std::cout << "wrote " << met_path << '\n';
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out_dir) {
  std::vector<wise::harness::MetricsReport> runs;
  std::vector<wise::aggregate::CalibrationReport> calibrations;
  for (const auto& path : inputs) {
    const std::string text = slurp(path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw wise::ParseError(path + ": " + e.what());
    }
    if (j.is_object() && j.contains("fits")) {
      // Aggregation result: embedded metrics plus fitted models. The final
      // fit feeds the calibration table; earlier rounds repeat the agents.
      const auto models = wise::harness::read_fitted_models(path);
      if (!models.empty())
        calibrations.push_back(wise::aggregate::calibration_report(models.back()));
      runs.push_back(wise::harness::deserialize_metrics(j.at("metrics").dump()));
    } else {
      runs.push_back(wise::harness::deserialize_metrics(text));
    }
  }

  const auto bundle = wise::harness::render_report(runs, calibrations);
  wise::harness::write_report(out_dir, bundle);
  std::cout << bundle.text;
  std::cout << "wrote " << out_dir << "/report.txt, accuracy.svg, rounds.svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted multi-agent debate harness"};
  app.set_version_flag("--version", "wise " WISE_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  int rounds = 0;
  int parallelism = 0;
  std::uint64_t seed = 0;
  bool resume = false;

  auto* run = app.add_subcommand(
      "run", "Debate every dataset problem and store transcripts");
  run->add_option("--config", config_path, "Run configuration file")
      ->required();
  auto* run_rounds = run->add_option("--rounds", rounds, "Override max rounds");
  auto* run_par =
      run->add_option("--parallelism", parallelism, "Worker thread count");
  run->add_flag("--resume", resume, "Skip problems with stored transcripts");
  auto* run_seed = run->add_option("--seed", seed, "Override the rng seed");
  std::string run_out;
  auto* run_out_opt =
      run->add_option("--out", run_out, "Transcript directory override");

  auto* agg = app.add_subcommand(
      "aggregate", "Aggregate stored transcripts and write metrics");
  agg->add_option("--config", config_path, "Run configuration file")
      ->required();
  std::string aggregator;
  auto* agg_name = agg->add_option(
      "--aggregator", aggregator, "majority | wmajority | ds | wise-ds");
  bool raw_answers = false;
  bool pooled_counts = false;
  agg->add_flag("--raw-answers", raw_answers,
                "Aggregate raw answers instead of decoded ones");
  agg->add_flag("--pooled-counts", pooled_counts,
                "Fit one model on counts pooled across rounds");
  std::string agg_out;
  auto* agg_out_opt = agg->add_option(
      "--out", agg_out, "Transcript directory (defaults to the config's)");

  auto* sim = app.add_subcommand(
      "simulate", "Synthetic debates through every aggregator, no backends");
  wise::harness::SimulateSpec spec;
  sim->add_option("--items", spec.items, "Problem count");
  sim->add_option("--options", spec.option_count, "Answer option count");
  sim->add_option("--solvers", spec.solver_count, "Solver count");
  sim->add_option("--reflectors", spec.reflector_count, "Reflector count");
  sim->add_option("--rounds", spec.rounds, "Debate rounds per item");
  sim->add_option("--solver-diag", spec.solver_diagonals,
                  "Diagonal mass per solver, comma separated")
      ->delimiter(',');
  sim->add_option("--reflector-diag", spec.reflector_diagonal,
                  "Shared reflector diagonal mass");
  std::vector<double> prior_weights;
  auto* sim_prior =
      sim->add_option("--prior-weights", prior_weights,
                      "Draw latent weights from this 3-way prior")
          ->delimiter(',');
  sim->add_option("--seed", spec.seed, "Generator seed");
  std::string sim_out;
  auto* sim_out_opt =
      sim->add_option("--out", sim_out, "Write metrics-simulate.json here");

  auto* rep = app.add_subcommand(
      "report", "Render plots and tables from metrics or aggregation files");
  std::vector<std::string> report_inputs;
  rep->add_option("files", report_inputs, "metrics-*.json or aggregate-*.json")
      ->required();
  std::string rep_out = "report";
  rep->add_option("--out", rep_out, "Report directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      auto cfg = wise::harness::load_config(config_path);
      if (run_rounds->count()) cfg.policy.max_rounds = rounds;
      if (run_par->count()) cfg.policy.parallelism = parallelism;
      if (resume) cfg.resume = true;
      if (run_seed->count()) cfg.seed = seed;
      if (run_out_opt->count()) cfg.output_dir = run_out;
      return cmd_run(cfg);
    }
    if (*agg) {
      auto cfg = wise::harness::load_config(config_path);
      if (agg_name->count())
        cfg.aggregation.aggregator =
            wise::harness::aggregator_from_string(aggregator);
      if (raw_answers) cfg.aggregation.raw_answers = true;
      if (pooled_counts) cfg.aggregation.pooled_counts = true;
      const std::string dir =
          agg_out_opt->count() ? agg_out : cfg.output_dir;
      return cmd_aggregate(cfg, dir);
    }
    if (*sim) {
      if (sim_prior->count()) {
        spec.weight_source = wise::harness::WeightSource::Prior;
        spec.weight_prior = prior_weights;
      }
      spec.validate();
      const auto outcome = wise::harness::simulate(spec);
      std::cout << outcome.table;
      if (sim_out_opt->count()) {
        fs::create_directories(sim_out);
        const std::string path =
            (fs::path(sim_out) / "metrics-simulate.json").string();
        wise::harness::write_metrics_file(path, outcome.metrics);
        std::cout << "wrote " << path << '\n';
      }
      return 0;
    }
    if (*rep) return cmd_report(report_inputs, rep_out);
  } catch (const wise::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const wise::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
