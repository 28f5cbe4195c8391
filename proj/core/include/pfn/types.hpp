#pragma once

#include <Eigen/Dense>

namespace pfn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Log-rates r; one entry per configurable parameter.
using ParameterVector = Eigen::VectorXd;

/// Desired value of the aggregates A^T pi.
using Target = Eigen::VectorXd;

/// Dense generator matrix; rows sum to zero.
using GeneratorMatrix = Eigen::MatrixXd;

}  // namespace pfn
