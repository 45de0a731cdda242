#pragma once

#include <string>
#include <vector>

#include "wise/aggregate/em.hpp"
#include "wise/aggregate/matrix.hpp"

namespace wise::aggregate {

struct AgentCalibration {
  std::string agent;
  double entropy_bits = 0.0;    // row-averaged Shannon entropy, base 2
  double kl_bits = 0.0;         // row-averaged KL from the smoothed identity
  double avg_correct = 0.0;     // mean diagonal mass
};

struct CalibrationReport {
  std::vector<AgentCalibration> solvers;
  std::vector<AgentCalibration> reflectors;
};

// Row-averaged Shannon entropy in bits, with 0 log 0 = 0.
double row_entropy_bits(const Matrix& m);

// Row-averaged KL(P || I) in bits against the identity smoothed just enough
// (1e-12 off-diagonal) to keep the divergence finite.
double kl_from_identity_bits(const Matrix& m);

double mean_diagonal(const Matrix& m);

CalibrationReport calibration_report(const ConfusionModel& model);

}  // namespace wise::aggregate
