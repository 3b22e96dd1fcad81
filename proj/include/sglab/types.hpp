#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sglab {

using Vec = Eigen::VectorXd;
// Batches of points are stored one sample per row (n x d).
using Mat = Eigen::MatrixXd;

// Class label fed to conditional models. kNullCondition is the empty label.
using Condition = int;
inline constexpr Condition kNullCondition = -1;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sglab
