#include "magyc/eval.hpp"

#include <cmath>

#include "magyc/model.hpp"
#include "magyc/so3.hpp"

namespace magyc {

namespace {

double resolve_declination(const Dataset& ds, std::optional<double> declination) {
    if (declination) return *declination;
    if (ds.truth) return declination_of(ds.truth->m0);
    throw input_error("missing-declination",
                      "declination required when the dataset carries no field truth");
}

}  // namespace

double declination_of(const Vec3& m0) {
    return std::atan2(m0.y(), m0.x());
}

double heading_from_mag(const Vec3& m_cal, double roll, double pitch, double declination_rad) {
    if (std::abs(std::abs(pitch) - M_PI / 2.0) < 1e-9) {
        throw degenerate_error("gimbal-lock", "heading undefined at pitch = +-90 deg");
    }
    // De-rotating roll then pitch leaves only the heading rotation:
    // Ry(pitch) Rx(roll) R^T m0 = Rz(heading)^T m0.
    const Vec3 level = rot_y(pitch) * rot_x(roll) * m_cal;
    return wrap_angle(declination_rad - std::atan2(level.y(), level.x()));
}

std::vector<double> heading_errors_deg(const Dataset& ds, const CalibrationState& x,
                                       std::optional<double> declination) {
    if (!ds.has_attitude()) {
        throw input_error("missing-ground-truth",
                          "heading evaluation needs attitude ground truth");
    }
    const double decl = resolve_declination(ds, declination);

    std::vector<double> errors;
    errors.reserve(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const AttitudeSample& att = ds.attitude[i];
        const Vec3 corrected = correct_measurement(x, ds.samples[i].m);
        const double estimated = heading_from_mag(corrected, att.roll, att.pitch, decl);
        errors.push_back(rad_to_deg(wrap_angle(estimated - att.heading)));
    }
    return errors;
}

HeadingStats heading_error_stats(const Dataset& ds, const CalibrationState& x,
                                 std::optional<double> declination) {
    const std::vector<double> errors = heading_errors_deg(ds, x, declination);
    const double n = static_cast<double>(errors.size());
    double mean = 0.0, sq = 0.0;
    for (double e : errors) {
        mean += e;
        sq += e * e;
    }
    mean /= n;
    double variance = 0.0;
    for (double e : errors) {
        variance += (e - mean) * (e - mean);
    }
    HeadingStats stats;
    stats.rmse_deg = std::sqrt(sq / n);
    stats.std_deg = std::sqrt(variance / n);
    return stats;
}

double heading_rmse(const Dataset& ds, const CalibrationState& x,
                    std::optional<double> declination) {
    return heading_error_stats(ds, x, declination).rmse_deg;
}

double mag_field_std(const Dataset& ds, const CalibrationState& x) {
    if (ds.samples.empty()) {
        throw input_error("empty-dataset", "cannot evaluate an empty dataset");
    }
    const double n = static_cast<double>(ds.samples.size());
    std::vector<double> magnitudes;
    magnitudes.reserve(ds.samples.size());
    double mean_raw = 0.0, mean_corrected = 0.0;
    for (const MeasurementSample& s : ds.samples) {
        magnitudes.push_back(correct_measurement(x, s.m).norm());
        mean_raw += s.m.norm();
        mean_corrected += magnitudes.back();
    }
    mean_raw /= n;
    mean_corrected /= n;
    if (!(mean_corrected > 0.0)) {
        throw numerical_error("numerical-failure", "corrected magnitudes collapsed to zero");
    }
    // two-pass variance: the one-pass form cancels catastrophically at
    // field-magnitude scale
    double variance = 0.0;
    for (double m : magnitudes) {
        variance += (m - mean_corrected) * (m - mean_corrected);
    }
    variance /= n;
    const double gauge = mean_raw / mean_corrected;
    return gauge * std::sqrt(variance);
}

ParameterErrors parameter_errors(const CalibrationState& x, const SimulationTruth& truth) {
    const Mat3 a_est = x.soft_iron();
    const Mat3 a_true = truth.soft_iron();

    ParameterErrors errors;
    // The system model pins A only up to scale; compare after the
    // least-squares optimal scalar alignment.
    const double denom = (a_est.array() * a_est.array()).sum();
    errors.scale = (a_est.array() * a_true.array()).sum() / denom;
    errors.soft_iron_error = (errors.scale * a_est - a_true).cwiseAbs();
    errors.hard_iron_error = (a_est * x.m_b - truth.hard_iron()).cwiseAbs();
    errors.gyro_bias_error = (x.w_b - truth.w_b).cwiseAbs();
    return errors;
}

EvaluationReport evaluate(const Dataset& ds, const CalibrationState& x,
                          const std::string& method,
                          std::optional<double> declination) {
    EvaluationReport report;
    report.method = method;
    report.dataset = ds.label;
    const HeadingStats stats = heading_error_stats(ds, x, declination);
    report.heading_rmse_deg = stats.rmse_deg;
    report.heading_std_deg = stats.std_deg;
    report.mag_field_std_mg = mag_field_std(ds, x);
    if (ds.truth) {
        report.params = parameter_errors(x, *ds.truth);
    }
    return report;
}

}  // namespace magyc
