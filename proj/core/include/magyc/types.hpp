#pragma once

#include <Eigen/Dense>

#include "magyc/errors.hpp"

// Units are fixed across the whole toolkit: magnetic field in milligauss,
// angular rate in rad/s, time in seconds.
namespace magyc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

inline bool is_finite(const Vec3& v) { return v.allFinite(); }
inline bool is_finite(const Mat3& m) { return m.allFinite(); }

inline bool is_symmetric(const Mat3& m, double tol = 1e-9) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

inline bool is_positive_definite(const Mat3& m) {
    if (!is_symmetric(m)) return false;
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    return es.eigenvalues().minCoeff() > 0.0;
}

/// Unique upper-triangular terms (c00, c01, c02, c11, c12, c22) of a
/// symmetric 3x3 matrix. Used both for the inverse soft-iron C and for
/// the soft-iron A itself.
struct SoftIronTerms {
    Vec6 c = Vec6::Zero();

    static SoftIronTerms identity() {
        SoftIronTerms t;
        t.c << 1.0, 0.0, 0.0, 1.0, 0.0, 1.0;
        return t;
    }

    static SoftIronTerms from_values(double c00, double c01, double c02,
                                     double c11, double c12, double c22) {
        SoftIronTerms t;
        t.c << c00, c01, c02, c11, c12, c22;
        return t;
    }

    /// Takes the upper triangle of m; symmetry of m is the caller's problem.
    static SoftIronTerms from_matrix(const Mat3& m) {
        return from_values(m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2));
    }

    Mat3 to_matrix() const {
        Mat3 m;
        m << c(0), c(1), c(2),
             c(1), c(3), c(4),
             c(2), c(4), c(5);
        return m;
    }

    double norm() const { return c.norm(); }
};

/// The 12-parameter calibration estimate: c parameterizes the inverse
/// soft-iron C = A^{-1}, m_b is the pseudo-hard-iron (mG) and w_b the
/// gyroscope bias (rad/s). The soft-iron A is recovered once at result
/// extraction by inverting to_matrix(c).
struct CalibrationState {
    SoftIronTerms c;
    Vec3 m_b = Vec3::Zero();
    Vec3 w_b = Vec3::Zero();

    static CalibrationState identity() {
        CalibrationState x;
        x.c = SoftIronTerms::identity();
        return x;
    }

    Vec12 to_vector() const {
        Vec12 v;
        v << c.c, m_b, w_b;
        return v;
    }

    static CalibrationState from_vector(const Vec12& v) {
        CalibrationState x;
        x.c.c = v.head<6>();
        x.m_b = v.segment<3>(6);
        x.w_b = v.tail<3>();
        return x;
    }

    Mat3 inverse_soft_iron() const { return c.to_matrix(); }

    /// A = C^{-1}. Rejects non-physical states: C must be positive definite
    /// with condition number below 1e8, otherwise the calibration failed.
    Mat3 soft_iron() const {
        const Mat3 C = c.to_matrix();
        Eigen::SelfAdjointEigenSolver<Mat3> es(C);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo <= 0.0) {
            throw numerical_error("non-spd-soft-iron",
                                  "inverse soft-iron estimate is not positive definite");
        }
        if (hi / lo > 1e8) {
            throw numerical_error("ill-conditioned-soft-iron",
                                  "inverse soft-iron estimate is ill-conditioned");
        }
        return C.inverse();
    }

    /// Physical hard-iron A*m_b (mG); invariant under the scale gauge.
    Vec3 hard_iron() const { return soft_iron() * m_b; }
};

/// One raw magnetometer + angular-rate reading.
struct MeasurementSample {
    double t = 0.0;  // s
    Vec3 m = Vec3::Zero();  // mG
    Vec3 w = Vec3::Zero();  // rad/s
};

/// Window-averaged sample with the numeric field derivative attached.
struct ProcessedSample {
    double t = 0.0;
    Vec3 m = Vec3::Zero();      // mG, window-averaged
    Vec3 m_dot = Vec3::Zero();  // mG/s, numeric derivative
    Vec3 w = Vec3::Zero();      // rad/s, window-averaged
};

}  // namespace magyc
