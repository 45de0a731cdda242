#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wise/backend/completion.hpp"

namespace wise::backend {

enum class SyntheticKind { Solver, Reflector };

// Simulated agent drawing labels from a fixed confusion matrix: a solver
// confuses K answer options, a reflector confuses the J = 3 weight classes.
struct SyntheticAgentSpec {
  SyntheticKind kind = SyntheticKind::Solver;
  std::vector<std::vector<double>> confusion;  // row-stochastic
  std::uint64_t rng_seed = 0;

  int classes() const { return static_cast<int>(confusion.size()); }

  // Rows sum to 1 within 1e-9, entries >= 0, square shape.
  void validate() const;
};

// Stateful emitter; one instance per worker (the RNG is not thread-safe).
// Sequences are bit-reproducible for a fixed seed: uniforms are derived as
// (x >> 11) * 2^-53 from mt19937_64 output rather than through
// implementation-defined std distributions.
class SyntheticEmitter {
 public:
  explicit SyntheticEmitter(SyntheticAgentSpec spec);

  const SyntheticAgentSpec& spec() const { return spec_; }

  // Sample a label from row `true_label` by inverse CDF.
  int emit(int true_label);

  double next_uniform();

 private:
  SyntheticAgentSpec spec_;
  std::mt19937_64 rng_;
};

int synthetic_solver_emit(SyntheticEmitter& e, int true_label);
int synthetic_reflector_emit(SyntheticEmitter& e, int true_weight);

}  // namespace wise::backend
