#pragma once

#include <span>

#include "magyc/types.hpp"

namespace magyc {

struct EllipsoidFitResult {
    Mat3 soft_iron = Mat3::Identity();  // A, symmetric positive definite
    Vec3 hard_iron = Vec3::Zero();      // ellipsoid center, mG
    double algebraic_residual = 0.0;    // relative residual of the quadric fit

    /// The fit expressed as a solver-compatible state (gyro bias zero).
    CalibrationState to_state() const;
};

/// Algebraic least-squares quadric fit with ellipsoid enforcement. The
/// soft-iron scale is fixed so the mean corrected magnitude equals the
/// mean raw magnitude. Magnetometer-only: no gyro bias estimate.
/// Throws non-ellipsoid on indefinite quadrics (e.g. near-planar clouds)
/// and insufficient-excitation on rank-deficient point sets.
EllipsoidFitResult ellipsoid_fit(std::span<const Vec3> mags);

}  // namespace magyc
