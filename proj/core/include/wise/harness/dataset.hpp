#pragma once

#include <string>
#include <vector>

#include "wise/model/types.hpp"

namespace wise::harness {

// Line-delimited dataset records: one JSON object per line with fields
//   id, question, images (list of relative paths), options (ordered
//   code -> text map), answer, tags (string map).
// Omitted options mean a free-form problem.  Every schema violation is
// reported with its line number and any violation aborts the load.
std::vector<model::Problem> parse_dataset(const std::string& text);
std::vector<model::Problem> load_dataset(const std::string& path);

}  // namespace wise::harness
