#pragma once

#include <Eigen/Core>

namespace amuse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace amuse
