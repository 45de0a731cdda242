#pragma once

#include <string>
#include <vector>

#include "wise/backend/completion.hpp"

namespace wise::backend {

enum class JudgeMode { Normalized, ModelJudge };

struct NormalizeOptions {
  // Trailing unit suffixes stripped when they follow a number. Longer
  // suffixes are tried first so "dm" wins over "m".
  std::vector<std::string> unit_suffixes = {"%", "dm", "cm", "m", "kg", "s", "h"};
  double numeric_rel_tol = 1e-6;
};

// Canonical form used for equivalence: trim, lowercase, strip a trailing
// unit suffix, collapse whitespace runs to single spaces.
std::string normalize_answer(const std::string& s,
                             const NormalizeOptions& opts = {});

// True when the canonical forms agree: numerically within relative tolerance
// if both parse as numbers, else as exact canonical strings. Both inputs must
// be nonempty.
bool judge_equivalent(const std::string& predicted,
                      const std::string& ground_truth,
                      const NormalizeOptions& opts = {});

// Delegates the comparison to a model with a fixed yes/no prompt.
// An unparseable verdict raises JudgeError.
bool judge_equivalent_model(const std::string& predicted,
                            const std::string& ground_truth,
                            ChatBackend& backend,
                            const model::AgentBinding& binding);

}  // namespace wise::backend
