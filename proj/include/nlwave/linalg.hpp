#pragma once

#include <Eigen/Dense>

namespace nlwave {

using Vector = Eigen::VectorXd;
/// Dense operators are stored row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace nlwave
