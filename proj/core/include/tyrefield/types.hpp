#pragma once

#include <complex>

#include <Eigen/Dense>

namespace tyrefield {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using CMat2 = Eigen::Matrix2cd;

}  // namespace tyrefield
