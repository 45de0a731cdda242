#include "wise/aggregate/calibration.hpp"

#include <cmath>

#include "wise/errors.hpp"

namespace wise::aggregate {

namespace {

constexpr double kIdentityEps = 1e-12;

void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("calibration needs a square non-empty matrix");
  }
}

}  // namespace

double row_entropy_bits(const Matrix& m) {
  require_square(m);
  double total = 0.0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const double p = m.at(r, c);
      if (p > 0.0) total -= p * std::log2(p);
    }
  }
  return total / m.rows();
}

double kl_from_identity_bits(const Matrix& m) {
  require_square(m);
  const int n = m.rows();
  const double off = kIdentityEps;
  const double diag = 1.0 - (n - 1) * kIdentityEps;
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double p = m.at(r, c);
      if (p > 0.0) total += p * std::log2(p / (r == c ? diag : off));
    }
  }
  return total / n;
}

double mean_diagonal(const Matrix& m) {
  require_square(m);
  double total = 0.0;
  for (int r = 0; r < m.rows(); ++r) total += m.at(r, r);
  return total / m.rows();
}

CalibrationReport calibration_report(const ConfusionModel& model) {
  model.validate();
  CalibrationReport report;
  for (std::size_t t = 0; t < model.solver_confusion.size(); ++t) {
    const Matrix& m = model.solver_confusion[t];
    report.solvers.push_back({"solver " + std::to_string(t),
                              row_entropy_bits(m), kl_from_identity_bits(m),
                              mean_diagonal(m)});
  }
  for (std::size_t c = 0; c < model.reflector_confusion.size(); ++c) {
    const Matrix& m = model.reflector_confusion[c];
    report.reflectors.push_back({"reflector " + std::to_string(c),
                                 row_entropy_bits(m), kl_from_identity_bits(m),
                                 mean_diagonal(m)});
  }
  return report;
}

}  // namespace wise::aggregate
