#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace antigone {

/// Binary value: a target label, a prediction or a sensitive attribute.
using Label = std::uint8_t;
using Labels = std::vector<Label>;

/// Row-major so that a row is one contiguous example.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Selects between the OpenMP kernels and the serial reference path.
/// Both produce bit-identical results; the serial path exists for testing
/// and for benchmarking the parallel one.
enum class Execution { serial, parallel };

}  // namespace antigone
