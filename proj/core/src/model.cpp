#include "magyc/model.hpp"

namespace magyc {

namespace {

DuplicationMap build_duplication_map() {
    // vec positions of each unique term and its symmetric mirror:
    //   c00 -> 0, c01 -> 1,3, c02 -> 2,6, c11 -> 4, c12 -> 5,7, c22 -> 8
    DuplicationMap d = DuplicationMap::Zero();
    d(0, 0) = 1.0;
    d(1, 1) = 1.0;
    d(3, 1) = 1.0;
    d(2, 2) = 1.0;
    d(6, 2) = 1.0;
    d(4, 3) = 1.0;
    d(5, 4) = 1.0;
    d(7, 4) = 1.0;
    d(8, 5) = 1.0;
    return d;
}

}  // namespace

const DuplicationMap& duplication_map() {
    static const DuplicationMap d = build_duplication_map();
    return d;
}

Vec3 residual(const CalibrationState& x, const ProcessedSample& s) {
    const Mat3 c = x.c.to_matrix();
    return skew(s.w - x.w_b) * (c * s.m - x.m_b) + c * s.m_dot;
}

Jacobian3x12 residual_jacobian(const CalibrationState& x, const ProcessedSample& s) {
    const Mat3 c = x.c.to_matrix();
    const Mat3 rate = skew(s.w - x.w_b);

    // dh/dvec(C) = m^T (x) [w - w_b]x + m_dot^T (x) I3, then chain through D.
    Eigen::Matrix<double, 3, 9> dvec;
    for (int j = 0; j < 3; ++j) {
        dvec.block<3, 3>(0, 3 * j) = s.m(j) * rate + s.m_dot(j) * Mat3::Identity();
    }

    Jacobian3x12 jac;
    jac.block<3, 6>(0, 0) = dvec * duplication_map();
    jac.block<3, 3>(0, 6) = skew(x.w_b - s.w);
    jac.block<3, 3>(0, 9) = skew(c * s.m - x.m_b);
    return jac;
}

double norm_error(const CalibrationState& x, double target) {
    return x.c.norm() - target;
}

Jacobian1x12 norm_jacobian(const CalibrationState& x) {
    const double n = x.c.norm();
    if (n <= 0.0) {
        throw numerical_error("singular-point",
                              "norm factor gradient is undefined at c = 0");
    }
    Jacobian1x12 jac = Jacobian1x12::Zero();
    jac.head<6>() = x.c.c.transpose() / n;
    return jac;
}

Vec3 correct_measurement(const CalibrationState& x, const Vec3& m_raw) {
    return x.c.to_matrix() * m_raw - x.m_b;
}

}  // namespace magyc
