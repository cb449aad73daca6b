#include "magyc/ellipsoid_fit.hpp"

#include <cmath>

namespace magyc {

namespace {

Mat3 symmetric_sqrt(const Mat3& spd) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(spd);
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

CalibrationState EllipsoidFitResult::to_state() const {
    CalibrationState x;
    const Mat3 inv = soft_iron.inverse();
    x.c = SoftIronTerms::from_matrix(0.5 * (inv + inv.transpose()));
    x.m_b = x.c.to_matrix() * hard_iron;
    x.w_b = Vec3::Zero();
    return x;
}

EllipsoidFitResult ellipsoid_fit(std::span<const Vec3> mags) {
    if (mags.size() < 9) {
        throw degenerate_error("insufficient-excitation",
                               "ellipsoid fit needs at least 9 points");
    }

    // Quadric x^T Q x + 2 q^T x + k = 0 with coefficient vector
    // v = (Q00, Q11, Q22, Q01, Q02, Q12, q0, q1, q2, k).
    Eigen::MatrixXd design(mags.size(), 10);
    for (std::size_t i = 0; i < mags.size(); ++i) {
        const double x = mags[i].x(), y = mags[i].y(), z = mags[i].z();
        design.row(static_cast<Eigen::Index>(i)) << x * x, y * y, z * z,
            2.0 * x * y, 2.0 * x * z, 2.0 * y * z, 2.0 * x, 2.0 * y, 2.0 * z, 1.0;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(8) <= sv(0) * 1e-10) {
        throw degenerate_error("insufficient-excitation",
                               "quadric coefficients are not uniquely determined "
                               "by this point cloud");
    }
    Eigen::VectorXd v = svd.matrixV().col(9);

    Mat3 q_mat;
    q_mat << v(0), v(3), v(4),
             v(3), v(1), v(5),
             v(4), v(5), v(2);
    Vec3 q_vec(v(6), v(7), v(8));
    double k = v(9);
    if (q_mat.trace() < 0.0) {
        q_mat = -q_mat;
        q_vec = -q_vec;
        k = -k;
    }

    Eigen::SelfAdjointEigenSolver<Mat3> es(q_mat);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || lo < hi * 1e-9) {
        throw degenerate_error("non-ellipsoid",
                               "fitted quadric is not an ellipsoid; the point cloud "
                               "is planar or otherwise degenerate");
    }

    const Vec3 center = -q_mat.ldlt().solve(q_vec);
    const double rho = center.dot(q_mat * center) - k;
    if (!(rho > 0.0)) {
        throw degenerate_error("non-ellipsoid", "fitted quadric has no real ellipsoid surface");
    }

    // Whitening shape: ||sqrt(Q)(m - center)|| is constant on the surface.
    const Mat3 shape = symmetric_sqrt(q_mat);
    double mean_raw = 0.0, mean_corrected = 0.0;
    for (const Vec3& m : mags) {
        mean_raw += m.norm();
        mean_corrected += (shape * (m - center)).norm();
    }
    if (!(mean_corrected > 0.0)) {
        throw degenerate_error("non-ellipsoid", "degenerate corrected magnitudes");
    }
    const double gamma = mean_raw / mean_corrected;

    EllipsoidFitResult result;
    const Mat3 inverse_soft_iron = gamma * shape;
    result.soft_iron = inverse_soft_iron.inverse();
    result.soft_iron = 0.5 * (result.soft_iron + result.soft_iron.transpose());
    result.hard_iron = center;
    result.algebraic_residual = sv(9) / sv(0);

    if (!is_positive_definite(result.soft_iron)) {
        throw degenerate_error("non-ellipsoid", "recovered soft-iron is not positive definite");
    }
    return result;
}

}  // namespace magyc
