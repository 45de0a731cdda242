#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wise/aggregate/counts.hpp"
#include "wise/aggregate/matrix.hpp"

namespace wise::aggregate {

struct EmOptions {
  double tol = 1e-6;         // relative log-likelihood improvement
  int max_iterations = 500;
  double smoothing = 1e-6;   // additive, applied to count accumulations

  void validate() const;
};

// Fitted two-role model.  solver_confusion[t] is K x K (true answer class by
// emitted class), reflector_confusion[c] is J x J (true weight class by
// emitted class).  Priors are the class marginals zeta.
struct ConfusionModel {
  std::vector<std::string> class_codes;       // size K
  std::vector<Matrix> solver_confusion;
  std::vector<Matrix> reflector_confusion;
  std::vector<double> answer_prior;           // zeta_beta, size K
  std::vector<double> weight_prior;           // zeta_alpha, size J (empty if m = 0)

  int class_count() const { return static_cast<int>(answer_prior.size()); }
  int weight_class_count() const { return static_cast<int>(weight_prior.size()); }

  void validate(double tol = 1e-9) const;
};

// Per-item joint posteriors gamma over (weight class alpha, answer class
// beta), stored as J x K grids.  The solver-only model uses J = 1 with the
// whole mass on that single row.
struct Responsibilities {
  std::vector<Matrix> gamma;

  std::vector<double> answer_marginal(int item) const;  // p_hat(beta), size K
  std::vector<double> weight_marginal(int item) const;  // p_hat(alpha), size J
  int map_answer(int item) const;   // argmax; ties -> smallest index
  int map_weight(int item) const;

  void validate(double tol = 1e-9) const;
};

struct EmResult {
  ConfusionModel model;
  Responsibilities responsibilities;
  std::vector<double> log_likelihood_trace;  // one entry per iteration
  int iterations = 0;
  bool converged = false;
};

// Invoked after every M-step with the refreshed model and the log-likelihood
// the E-step just computed under the previous model.
using IterationFn =
    std::function<void(int iteration, const ConfusionModel&, double log_likelihood)>;

// Classic single-role Dawid-Skene over the solver tensors only.  Ignores any
// reflector counts present in `counts`.
EmResult classic_ds_em(const VoteCounts& counts, const EmOptions& options = {},
                       const IterationFn& on_iteration = nullptr);

// Two-role joint fit over solver and reflector tensors.
EmResult wise_ds_em(const VoteCounts& counts, const EmOptions& options = {},
                    const IterationFn& on_iteration = nullptr);

struct PosteriorResult {
  Responsibilities responsibilities;
  double log_likelihood = 0.0;
};

// One E-step under a fixed model: per-item responsibilities and the
// observed-data log-likelihood of `counts` under `model`.
PosteriorResult joint_posterior(const VoteCounts& counts,
                                const ConfusionModel& model);

}  // namespace wise::aggregate
