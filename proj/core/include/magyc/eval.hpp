#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magyc/sim.hpp"
#include "magyc/types.hpp"

// Evaluation metrics shared by every calibration method: heading accuracy
// against attitude ground truth, calibrated field-magnitude spread, and
// parameter-recovery errors against simulation truth.
namespace magyc {

struct HeadingStats {
    double rmse_deg = 0.0;
    double std_deg = 0.0;  // standard deviation of the error, offset removed
};

/// Tilt-compensated magnetic heading from a calibrated field vector,
/// wrapped to (-pi, pi]. Declination is the horizontal field direction.
double heading_from_mag(const Vec3& m_cal, double roll, double pitch, double declination_rad);

/// Declination implied by a world field vector.
double declination_of(const Vec3& m0);

/// Per-sample wrapped heading error (deg) of the corrected field against
/// attitude ground truth.
std::vector<double> heading_errors_deg(const Dataset& ds, const CalibrationState& x,
                                       std::optional<double> declination_rad = {});

HeadingStats heading_error_stats(const Dataset& ds, const CalibrationState& x,
                                 std::optional<double> declination_rad = {});

double heading_rmse(const Dataset& ds, const CalibrationState& x,
                    std::optional<double> declination_rad = {});

/// Standard deviation of corrected field magnitudes after rescaling so the
/// mean corrected magnitude matches the mean raw magnitude. The rescaling
/// removes the scale gauge left open by the system model.
double mag_field_std(const Dataset& ds, const CalibrationState& x);

struct ParameterErrors {
    Vec3 hard_iron_error = Vec3::Zero();   // |A m_b - A* m_b*|, mG
    Mat3 soft_iron_error = Mat3::Zero();   // |k A - A*| entrywise after scale alignment
    Vec3 gyro_bias_error = Vec3::Zero();   // rad/s
    double scale = 1.0;                    // the aligning scalar k
};

ParameterErrors parameter_errors(const CalibrationState& x, const SimulationTruth& truth);

struct EvaluationReport {
    std::string method;
    std::string dataset;
    double heading_rmse_deg = 0.0;
    double heading_std_deg = 0.0;
    double mag_field_std_mg = 0.0;
    std::optional<ParameterErrors> params;
};

EvaluationReport evaluate(const Dataset& ds, const CalibrationState& x,
                          const std::string& method,
                          std::optional<double> declination_rad = {});

}  // namespace magyc
