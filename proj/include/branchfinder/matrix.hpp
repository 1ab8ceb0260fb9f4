#pragma once

#include <cstddef>
#include <vector>

namespace branchfinder {

/// Dense row-major matrix; just enough structure for weight storage and the
/// kernel calls.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
    std::size_t size() const { return v.size(); }
};

}  // namespace branchfinder
