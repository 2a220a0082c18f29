#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace acmri {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

}  // namespace acmri
