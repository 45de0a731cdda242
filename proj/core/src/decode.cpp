#include "wise/aggregate/decode.hpp"

#include <algorithm>

#include "wise/errors.hpp"

namespace wise::aggregate {

namespace {

// Argmax of prior[b] * confusion[b][emitted]; when the emitted class ties the
// winner it is kept.
int map_decode(const std::vector<double>& prior, const Matrix& confusion,
               int emitted) {
  int best = 0;
  double best_score = prior[0] * confusion.at(0, emitted);
  for (int b = 1; b < static_cast<int>(prior.size()); ++b) {
    const double score = prior[b] * confusion.at(b, emitted);
    if (score > best_score) {
      best = b;
      best_score = score;
    }
  }
  const double emitted_score = prior[emitted] * confusion.at(emitted, emitted);
  return emitted_score == best_score ? emitted : best;
}

}  // namespace

RoundBallot raw_ballot(const model::DebateRound& round) {
  RoundBallot out;
  out.answers.reserve(round.responses.size());
  for (const auto& r : round.responses) out.answers.push_back(r.parsed_answer);
  out.weights.resize(round.solver_count(),
                     std::vector<int>(round.reflector_count(), 0));
  for (int s = 0; s < round.solver_count(); ++s) {
    for (int j = 0; j < round.reflector_count(); ++j) {
      const int w = round.weight(s, j);
      out.weights[s][j] = w == model::kReflectorFailure ? 0 : w;
    }
  }
  return out;
}

RoundBallot posterior_decode(const model::DebateRound& round,
                             const ConfusionModel& model) {
  const int n = round.solver_count();
  const int m = round.reflector_count();
  if (static_cast<int>(model.solver_confusion.size()) != n) {
    throw DimensionMismatch("model solver count does not match the round");
  }
  const bool decode_weights = !model.reflector_confusion.empty();
  if (decode_weights &&
      static_cast<int>(model.reflector_confusion.size()) != m) {
    throw DimensionMismatch("model reflector count does not match the round");
  }

  RoundBallot out;
  out.answers.reserve(n);
  for (int s = 0; s < n; ++s) {
    const auto& ans = round.responses[s].parsed_answer;
    if (ans.is_abstain()) {
      out.answers.push_back(model::AnswerOption::abstain());
      continue;
    }
    const auto it = std::find(model.class_codes.begin(),
                              model.class_codes.end(), ans.code());
    if (it == model.class_codes.end()) {
      throw DimensionMismatch("answer " + ans.code() +
                              " is not among the model's classes");
    }
    const int emitted = static_cast<int>(it - model.class_codes.begin());
    const int decoded =
        map_decode(model.answer_prior, model.solver_confusion[s], emitted);
    out.answers.push_back(model::AnswerOption{model.class_codes[decoded]});
  }

  out.weights.resize(n, std::vector<int>(m, 0));
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < m; ++j) {
      const int w = round.weight(s, j);
      if (w == model::kReflectorFailure) {
        out.weights[s][j] = 0;
      } else if (decode_weights) {
        out.weights[s][j] =
            map_decode(model.weight_prior, model.reflector_confusion[j], w);
      } else {
        out.weights[s][j] = w;
      }
    }
  }
  return out;
}

}  // namespace wise::aggregate
