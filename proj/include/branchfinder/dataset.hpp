#pragma once

#include <optional>
#include <vector>

namespace branchfinder {

struct Sample {
    std::vector<double> x;
    double y = 0.0;
    std::optional<int> true_branch;  // generator branch when known
};

struct Dataset {
    int input_dim = 0;
    std::vector<Sample> samples;

    int n() const { return static_cast<int>(samples.size()); }
};

}  // namespace branchfinder
