#include "wise/backend/synthetic.hpp"

#include <cmath>

#include "wise/errors.hpp"

namespace wise::backend {

void SyntheticAgentSpec::validate() const {
  if (confusion.empty()) throw ConfigError("synthetic agent without confusion");
  const std::size_t k = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != k) {
      throw DimensionMismatch("confusion matrix is not square");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ConfigError("negative confusion entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("confusion row sums to " + std::to_string(sum));
    }
  }
  if (kind == SyntheticKind::Reflector && k != model::kWeightClasses) {
    throw DimensionMismatch("reflector confusion must be 3x3");
  }
}

SyntheticEmitter::SyntheticEmitter(SyntheticAgentSpec spec)
    : spec_(std::move(spec)), rng_(spec_.rng_seed) {
  spec_.validate();
}

double SyntheticEmitter::next_uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

int SyntheticEmitter::emit(int true_label) {
  const int k = spec_.classes();
  if (true_label < 0 || true_label >= k) {
    throw InvalidLabel("true label " + std::to_string(true_label) +
                       " outside [0, " + std::to_string(k) + ")");
  }
  const double u = next_uniform();
  const auto& row = spec_.confusion[true_label];
  double acc = 0.0;
  for (int j = 0; j < k; ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  return k - 1;  // guard against rounding at the top of the CDF
}

int synthetic_solver_emit(SyntheticEmitter& e, int true_label) {
  if (e.spec().kind != SyntheticKind::Solver) {
    throw ConfigError("synthetic_solver_emit on a non-solver spec");
  }
  return e.emit(true_label);
}

int synthetic_reflector_emit(SyntheticEmitter& e, int true_weight) {
  if (e.spec().kind != SyntheticKind::Reflector) {
    throw ConfigError("synthetic_reflector_emit on a non-reflector spec");
  }
  return e.emit(true_weight);
}

}  // namespace wise::backend
