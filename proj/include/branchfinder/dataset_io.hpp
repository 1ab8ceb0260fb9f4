#pragma once

#include <string>

#include "branchfinder/dataset.hpp"

namespace branchfinder {

/// CSV with header x1,...,xd,y,branch; floats as 17 significant digits
/// (round-trip exact); branch is a non-negative integer or NA; LF endings.
void write_csv(const std::string& path, const Dataset& data);

/// Parses the format written by write_csv. Errors carry 1-based line numbers.
Dataset read_csv(const std::string& path);

}  // namespace branchfinder
