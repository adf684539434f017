#pragma once

#include <Eigen/Dense>

namespace tsvdtd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace tsvdtd
