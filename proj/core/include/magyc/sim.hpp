#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magyc/types.hpp"

// Monte Carlo generator for sinusoidal-motion AHRS streams. Three dataset
// families cover progressively constrained angular excitation: WAM (wide),
// MAM (moderate) and LAM (low).
namespace magyc {

enum class MotionKind { WAM, MAM, LAM };

std::string to_string(MotionKind kind);
MotionKind motion_kind_from_string(const std::string& name);

struct AxisMotion {
    double amplitude_rad = 0.0;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

struct MotionProfile {
    AxisMotion roll, pitch, heading;
    double duration_s = 400.0;
    double rate_hz = 25.0;
    bool pitch_clamped = false;  // amplitude reduced to dodge the Euler singularity

    std::size_t sample_count() const {
        return static_cast<std::size_t>(duration_s * rate_hz);
    }
};

struct SimulationTruth {
    Vec3 m0 = Vec3::Zero();        // world magnetic field, mG
    SoftIronTerms a;               // soft-iron A terms
    Vec3 m_b = Vec3::Zero();       // pseudo-hard-iron, mG
    Vec3 w_b = Vec3::Zero();       // gyro bias, rad/s
    double sigma_mag = 0.0;        // mG
    double sigma_gyro = 0.0;       // rad/s

    /// Reference scenario used throughout the test harness.
    static SimulationTruth reference();

    Mat3 soft_iron() const { return a.to_matrix(); }
    Vec3 hard_iron() const { return soft_iron() * m_b; }

    /// The truth expressed as an internal solver state (c = A^{-1} terms).
    CalibrationState to_state() const;
};

struct AttitudeSample {
    double t = 0.0;
    double roll = 0.0, pitch = 0.0, heading = 0.0;  // rad
};

struct Dataset {
    std::vector<MeasurementSample> samples;
    std::optional<SimulationTruth> truth;
    std::vector<AttitudeSample> attitude;  // aligned 1:1 with samples when present
    std::string label;

    bool has_attitude() const { return attitude.size() == samples.size() && !samples.empty(); }
};

/// Amplitudes per family (roll, pitch, heading): WAM (180, 180, 180) deg,
/// MAM (5, 45, 180), LAM (5, 15, 90); 400 s at 25 Hz. Pitch is clamped to
/// 89 deg. Phases are drawn from the seed, frequencies are fixed
/// incommensurate defaults.
MotionProfile profile_for(MotionKind kind, std::uint64_t seed);

/// Euler angles amplitude*sin(2*pi*f*t + phase), radians.
Vec3 attitude_at(const MotionProfile& p, double t);

/// Exact body angular rate through the Z-Y-X kinematics map.
Vec3 angular_rate_at(const MotionProfile& p, double t);

/// Forward model: m = A(R^T m0 + m_b) + noise, w = w_true + w_b + noise.
Dataset synthesize(const MotionProfile& p, const SimulationTruth& truth, std::uint64_t seed);

/// Analytic noise-free derivative of the measured field at time t
/// (test oracle for the numeric differentiation path).
Vec3 field_derivative_at(const MotionProfile& p, const SimulationTruth& truth, double t);

struct MonteCarloRun {
    std::map<MotionKind, Dataset> calibration;
    Dataset evaluation;  // dedicated moderate-excitation dataset, distinct phases
};

std::vector<MonteCarloRun> monte_carlo(std::span<const MotionKind> kinds,
                                       const SimulationTruth& truth,
                                       int runs, std::uint64_t seed);

/// Deterministic stream splitter for deriving independent sub-seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace magyc
