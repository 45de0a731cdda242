#include "wise/harness/simulate_cmd.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "wise/backend/synthetic.hpp"
#include "wise/errors.hpp"
#include "wise/model/types.hpp"

namespace wise::harness {
namespace {

using backend::SyntheticAgentSpec;
using backend::SyntheticEmitter;
using backend::SyntheticKind;

std::vector<std::vector<double>> diagonal_rows(int classes, double diag) {
  const double off = classes > 1 ? (1.0 - diag) / (classes - 1) : 0.0;
  std::vector<std::vector<double>> rows(classes,
                                        std::vector<double>(classes, off));
  for (int i = 0; i < classes; ++i) rows[i][i] = diag;
  return rows;
}

aggregate::Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  const int c = n > 0 ? static_cast<int>(rows.front().size()) : 0;
  aggregate::Matrix m(n, c);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < c; ++j) m.at(r, j) = rows[r][j];
  }
  return m;
}

std::string item_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "sim-%04d", i);
  return buf;
}

}  // namespace

void SimulateSpec::validate() const {
  if (items < 1) throw ConfigError("simulate: items must be positive");
  if (option_count < 2 || option_count > 26) {
    throw ConfigError("simulate: option count must be in [2, 26]");
  }
  if (solver_count < 1) throw ConfigError("simulate: need at least one solver");
  if (reflector_count < 0) throw ConfigError("simulate: negative reflector count");
  if (rounds < 1) throw ConfigError("simulate: rounds must be positive");
  if (solver_diagonals.size() != 1 &&
      solver_diagonals.size() != static_cast<std::size_t>(solver_count)) {
    throw ConfigError("simulate: need one shared or one per-solver diagonal");
  }
  for (double d : solver_diagonals) {
    if (!(d > 0.0) || d > 1.0) {
      throw ConfigError("simulate: solver diagonal outside (0, 1]");
    }
  }
  if (!(reflector_diagonal > 0.0) || reflector_diagonal > 1.0) {
    throw ConfigError("simulate: reflector diagonal outside (0, 1]");
  }
  if (weight_prior.size() != model::kWeightClasses) {
    throw ConfigError("simulate: weight prior needs one entry per class");
  }
  double sum = 0.0;
  for (double p : weight_prior) {
    if (p < 0.0) throw ConfigError("simulate: negative weight prior entry");
    sum += p;
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9) {
    throw ConfigError("simulate: weight prior must sum to 1");
  }
}

SyntheticBatch make_synthetic_batch(const SimulateSpec& spec) {
  spec.validate();
  const int K = spec.option_count;
  const int n = spec.solver_count;
  const int m = spec.reflector_count;

  std::vector<std::string> codes;
  for (int b = 0; b < K; ++b) {
    codes.push_back(model::canonical_option_code(b, model::OptionCodeStyle::Letter));
  }

  SyntheticBatch batch;
  auto diag_of = [&](int t) {
    return spec.solver_diagonals.size() == 1 ? spec.solver_diagonals[0]
                                             : spec.solver_diagonals[t];
  };
  std::vector<SyntheticEmitter> solvers;
  for (int t = 0; t < n; ++t) {
    batch.solver_confusion.push_back(to_matrix(diagonal_rows(K, diag_of(t))));
    solvers.push_back(SyntheticEmitter(SyntheticAgentSpec{
        SyntheticKind::Solver, diagonal_rows(K, diag_of(t)), spec.seed + 1 + t}));
  }
  std::vector<SyntheticEmitter> reflectors;
  for (int c = 0; c < m; ++c) {
    batch.reflector_confusion.push_back(
        to_matrix(diagonal_rows(model::kWeightClasses, spec.reflector_diagonal)));
    reflectors.push_back(SyntheticEmitter(SyntheticAgentSpec{
        SyntheticKind::Reflector,
        diagonal_rows(model::kWeightClasses, spec.reflector_diagonal),
        spec.seed + 101 + c}));
  }
  // Uniform ground truth; row 0 of a uniform matrix is a uniform draw.
  SyntheticEmitter truth_emitter(SyntheticAgentSpec{
      SyntheticKind::Solver,
      std::vector<std::vector<double>>(K, std::vector<double>(K, 1.0 / K)),
      spec.seed + 999});
  SyntheticEmitter alpha_emitter(SyntheticAgentSpec{
      SyntheticKind::Reflector,
      std::vector<std::vector<double>>(model::kWeightClasses, spec.weight_prior),
      spec.seed + 555});

  std::vector<int> truths(spec.items);
  for (int i = 0; i < spec.items; ++i) truths[i] = truth_emitter.emit(0);

  // labels[i][r][t]
  std::vector<std::vector<std::vector<int>>> labels(
      spec.items, std::vector<std::vector<int>>(
                      spec.rounds, std::vector<int>(n, 0)));
  for (int i = 0; i < spec.items; ++i) {
    for (int r = 0; r < spec.rounds; ++r) {
      for (int t = 0; t < n; ++t) {
        labels[i][r][t] = solvers[t].emit(truths[i]);
      }
    }
  }

  for (int i = 0; i < spec.items; ++i) {
    model::Problem p;
    p.id = item_id(i);
    p.question = "synthetic item " + std::to_string(i);
    for (const auto& c : codes) p.options.emplace_back(c, "");
    p.ground_truth = codes[truths[i]];
    p.tags["modality"] = "synthetic";
    p.validate();
    batch.problems.push_back(std::move(p));

    int alpha = 0;
    if (spec.weight_source == WeightSource::Prior) {
      alpha = alpha_emitter.emit(0);
    } else {
      // Latent answer quality from realized solver correctness: mostly
      // right emissions score 2, any right 1, none 0.
      int correct = 0;
      for (int r = 0; r < spec.rounds; ++r) {
        for (int t = 0; t < n; ++t) {
          if (labels[i][r][t] == truths[i]) ++correct;
        }
      }
      if (correct > 0) alpha = 2 * correct >= n * spec.rounds ? 2 : 1;
    }

    model::DebateTranscript transcript;
    transcript.problem_id = batch.problems.back().id;
    transcript.roster_fingerprint = "synthetic";
    transcript.option_codes = codes;
    transcript.termination = model::Termination::MaxRounds;
    for (int r = 0; r < spec.rounds; ++r) {
      model::DebateRound round;
      round.round_index = r + 1;
      for (int t = 0; t < n; ++t) {
        model::SolverResponse resp;
        resp.round = r + 1;
        resp.solver_index = t;
        resp.parsed_answer = model::AnswerOption(codes[labels[i][r][t]]);
        resp.raw_text = "Answer: " + codes[labels[i][r][t]];
        resp.parse_ok = true;
        round.responses.push_back(std::move(resp));
      }
      for (int t = 0; t < n; ++t) {
        std::vector<model::ReflectorJudgment> row;
        for (int c = 0; c < m; ++c) {
          model::ReflectorJudgment g;
          g.round = r + 1;
          g.solver_index = t;
          g.reflector_index = c;
          g.weight = reflectors[c].emit(alpha);
          row.push_back(std::move(g));
        }
        round.judgments.push_back(std::move(row));
      }
      if (r + 1 < spec.rounds) {
        round.orchestrator_summaries.assign(n, "");
      }
      transcript.rounds.push_back(std::move(round));
    }
    transcript.validate();
    batch.transcripts.push_back(std::move(transcript));
  }
  return batch;
}

SimulateOutcome simulate(const SimulateSpec& spec) {
  const SyntheticBatch batch = make_synthetic_batch(spec);

  std::ostringstream label;
  label << "sim items=" << spec.items << " K=" << spec.option_count
        << " n=" << spec.solver_count << " m=" << spec.reflector_count
        << " rounds=" << spec.rounds << " seed=" << spec.seed;

  SimulateOutcome outcome;
  const Aggregator all[] = {Aggregator::Majority, Aggregator::WeightedMajority,
                            Aggregator::ClassicDs, Aggregator::WiseDs};
  for (Aggregator a : all) {
    AggregateOptions opts;
    opts.flags.aggregator = a;
    opts.flags.pooled_counts = true;  // one fit over all emissions
    opts.label = label.str();
    const auto result =
        aggregate_transcripts(batch.transcripts, batch.problems, opts);
    outcome.accuracy[to_string(a)] = result.metrics.accuracy;

    if (a == Aggregator::ClassicDs || a == Aggregator::WiseDs) {
      const auto& model = result.round_fits.front().model;
      double solver_err = 0.0;
      for (int t = 0; t < spec.solver_count; ++t) {
        solver_err = std::max(
            solver_err, aggregate::max_row_l1(model.solver_confusion[t],
                                              batch.solver_confusion[t]));
      }
      outcome.recovery[to_string(a) + " solver"] = solver_err;
      if (a == Aggregator::WiseDs && spec.reflector_count > 0) {
        double reflector_err = 0.0;
        for (int c = 0; c < spec.reflector_count; ++c) {
          reflector_err = std::max(
              reflector_err,
              aggregate::max_row_l1(model.reflector_confusion[c],
                                    batch.reflector_confusion[c]));
        }
        outcome.recovery["wise-ds reflector"] = reflector_err;
      }
    }
    if (a == Aggregator::WiseDs) outcome.metrics = result.metrics;
  }

  std::ostringstream table;
  table << label.str() << "\n";
  char line[96];
  for (const auto& [name, acc] : outcome.accuracy) {
    std::snprintf(line, sizeof(line), "  %-18s accuracy %.4f\n", name.c_str(), acc);
    table << line;
  }
  for (const auto& [name, err] : outcome.recovery) {
    std::snprintf(line, sizeof(line), "  %-18s max row L1 %.4f\n", name.c_str(),
                  err);
    table << line;
  }
  outcome.table = table.str();
  return outcome;
}

}  // namespace wise::harness
