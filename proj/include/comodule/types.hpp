#pragma once

#include <Eigen/Dense>

namespace comodule {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace comodule
