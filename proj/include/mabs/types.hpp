#pragma once

#include <Eigen/Dense>

namespace mabs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace mabs
