#pragma once

#include "magyc/so3.hpp"
#include "magyc/types.hpp"

// Attitude-free calibration system model. With C the inverse soft-iron,
// each processed magnetometer/gyro pair constrains the state through
//
//   h(x) = [w - w_b]x (C m - m_b) + C m_dot
//
// which is zero for exact measurements at the true calibration. The
// model and its algebraic Jacobians are the heart of the toolkit; the
// solver consumes them through whitened unary factors.
namespace magyc {

using Jacobian3x12 = Eigen::Matrix<double, 3, 12>;
using Jacobian1x12 = Eigen::Matrix<double, 1, 12>;
using DuplicationMap = Eigen::Matrix<double, 9, 6>;

/// Constant D with vec(to_matrix(c)) = D*c (column-major vec).
const DuplicationMap& duplication_map();

/// Residual of the system model at state x for sample s, in mG/s.
Vec3 residual(const CalibrationState& x, const ProcessedSample& s);

/// 3x12 block Jacobian [dh/dc | dh/dm_b | dh/dw_b].
Jacobian3x12 residual_jacobian(const CalibrationState& x, const ProcessedSample& s);

/// ||c|| - target. The unit-norm constraint pins the scale gauge and keeps
/// the optimizer away from the trivial all-zero solution.
double norm_error(const CalibrationState& x, double target = 1.0);

/// 1x12 gradient of norm_error: c^T/||c|| in the c block, zero elsewhere.
/// Throws at the singular point c = 0.
Jacobian1x12 norm_jacobian(const CalibrationState& x);

/// Calibrated field estimate C*m_raw - m_b (mG), up to the scale gauge.
Vec3 correct_measurement(const CalibrationState& x, const Vec3& m_raw);

}  // namespace magyc
