#include "magyc/sim.hpp"

#include <cmath>
#include <random>

#include "magyc/model.hpp"
#include "magyc/so3.hpp"

namespace magyc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// Incommensurate default frequencies sweep the attitude sphere instead of
// retracing a closed curve. Kept slow enough that the one-second averaging
// window resolves the field dynamics (peak rates stay near vehicle scale).
constexpr double kRollHz = 0.005;
constexpr double kPitchHz = 0.008;
constexpr double kHeadingHz = 0.011;
constexpr double kMaxPitchDeg = 89.0;

double axis_angle(const AxisMotion& a, double t) {
    return a.amplitude_rad * std::sin(kTwoPi * a.frequency_hz * t + a.phase_rad);
}

double axis_rate(const AxisMotion& a, double t) {
    const double w = kTwoPi * a.frequency_hz;
    return a.amplitude_rad * w * std::cos(w * t + a.phase_rad);
}

void check_time(const MotionProfile& p, double t) {
    if (t < 0.0 || t > p.duration_s) {
        throw input_error("out-of-range", "time outside the motion profile duration");
    }
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string to_string(MotionKind kind) {
    switch (kind) {
        case MotionKind::WAM: return "WAM";
        case MotionKind::MAM: return "MAM";
        case MotionKind::LAM: return "LAM";
    }
    return "?";
}

MotionKind motion_kind_from_string(const std::string& name) {
    if (name == "WAM" || name == "wam") return MotionKind::WAM;
    if (name == "MAM" || name == "mam") return MotionKind::MAM;
    if (name == "LAM" || name == "lam") return MotionKind::LAM;
    throw input_error("bad-kind", "unknown dataset kind: " + name);
}

SimulationTruth SimulationTruth::reference() {
    SimulationTruth t;
    t.m0 = Vec3(227.0, 52.0, 412.0);
    t.a = SoftIronTerms::from_values(1.10, 0.10, 0.04, 0.88, 0.02, 1.22);
    t.m_b = Vec3(20.0, 120.0, 90.0);
    t.w_b = Vec3(4e-3, -5e-3, 2e-3);
    t.sigma_mag = 1.0;
    t.sigma_gyro = 5e-3;
    return t;
}

CalibrationState SimulationTruth::to_state() const {
    const Mat3 a_mat = a.to_matrix();
    if (!is_positive_definite(a_mat)) {
        throw input_error("bad-truth", "soft-iron truth must be symmetric positive definite");
    }
    CalibrationState x;
    x.c = SoftIronTerms::from_matrix(a_mat.inverse());
    x.m_b = m_b;
    x.w_b = w_b;
    return x;
}

MotionProfile profile_for(MotionKind kind, std::uint64_t seed) {
    double roll_deg = 0.0, pitch_deg = 0.0, heading_deg = 0.0;
    switch (kind) {
        case MotionKind::WAM: roll_deg = 180.0; pitch_deg = 180.0; heading_deg = 180.0; break;
        case MotionKind::MAM: roll_deg = 5.0;   pitch_deg = 45.0;  heading_deg = 180.0; break;
        case MotionKind::LAM: roll_deg = 5.0;   pitch_deg = 15.0;  heading_deg = 90.0;  break;
    }

    MotionProfile p;
    p.roll = {deg_to_rad(roll_deg), kRollHz, 0.0};
    p.pitch = {deg_to_rad(pitch_deg), kPitchHz, 0.0};
    p.heading = {deg_to_rad(heading_deg), kHeadingHz, 0.0};
    if (pitch_deg > kMaxPitchDeg) {
        p.pitch.amplitude_rad = deg_to_rad(kMaxPitchDeg);
        p.pitch_clamped = true;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    p.roll.phase_rad = phase(rng);
    p.pitch.phase_rad = phase(rng);
    p.heading.phase_rad = phase(rng);
    return p;
}

Vec3 attitude_at(const MotionProfile& p, double t) {
    check_time(p, t);
    return Vec3(axis_angle(p.roll, t), axis_angle(p.pitch, t), axis_angle(p.heading, t));
}

Vec3 angular_rate_at(const MotionProfile& p, double t) {
    check_time(p, t);
    const double roll = axis_angle(p.roll, t);
    const double pitch = axis_angle(p.pitch, t);
    const double roll_rate = axis_rate(p.roll, t);
    const double pitch_rate = axis_rate(p.pitch, t);
    const double heading_rate = axis_rate(p.heading, t);

    if (std::abs(std::abs(pitch) - M_PI / 2.0) < 1e-12) {
        throw degenerate_error("gimbal-lock", "angular rate undefined at pitch = +-90 deg");
    }

    // Body rate from Z-Y-X Euler rates; satisfies w = vee(R^T dR/dt).
    const double sphi = std::sin(roll), cphi = std::cos(roll);
    const double sth = std::sin(pitch), cth = std::cos(pitch);
    return Vec3(roll_rate - heading_rate * sth,
                pitch_rate * cphi + heading_rate * cth * sphi,
                -pitch_rate * sphi + heading_rate * cth * cphi);
}

Dataset synthesize(const MotionProfile& p, const SimulationTruth& truth, std::uint64_t seed) {
    const std::size_t n = p.sample_count();
    const double dt = 1.0 / p.rate_hz;
    const Mat3 a_mat = truth.soft_iron();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset ds;
    ds.truth = truth;
    ds.samples.reserve(n);
    ds.attitude.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Vec3 euler = attitude_at(p, t);
        const Mat3 r = rotation_zyx(euler.x(), euler.y(), euler.z());

        const Vec3 field_body = r.transpose() * truth.m0;
        Vec3 mag = a_mat * (field_body + truth.m_b);
        Vec3 gyro = angular_rate_at(p, t) + truth.w_b;
        for (int k = 0; k < 3; ++k) {
            mag(k) += truth.sigma_mag * gauss(rng);
        }
        for (int k = 0; k < 3; ++k) {
            gyro(k) += truth.sigma_gyro * gauss(rng);
        }

        ds.samples.push_back({t, mag, gyro});
        ds.attitude.push_back({t, euler.x(), euler.y(), euler.z()});
    }
    return ds;
}

Vec3 field_derivative_at(const MotionProfile& p, const SimulationTruth& truth, double t) {
    const Vec3 euler = attitude_at(p, t);
    const Mat3 r = rotation_zyx(euler.x(), euler.y(), euler.z());
    const Vec3 w = angular_rate_at(p, t);
    // m_m = A(R^T m0 + m_b)  =>  dm_m/dt = -A [w]x R^T m0.
    return -truth.soft_iron() * skew(w) * (r.transpose() * truth.m0);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t state = master ^ (0x632be59bd9b4e019ULL * (stream + 1));
    return splitmix64(state);
}

std::vector<MonteCarloRun> monte_carlo(std::span<const MotionKind> kinds,
                                       const SimulationTruth& truth,
                                       int runs, std::uint64_t seed) {
    if (runs < 1) {
        throw input_error("bad-runs", "monte carlo needs at least one run");
    }

    std::vector<MonteCarloRun> out;
    out.reserve(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        MonteCarloRun run;
        std::uint64_t stream = 0;
        for (const MotionKind kind : kinds) {
            const MotionProfile p = profile_for(kind, derive_seed(run_seed, stream++));
            Dataset ds = synthesize(p, truth, derive_seed(run_seed, stream++));
            ds.label = to_string(kind);
            run.calibration.emplace(kind, std::move(ds));
        }
        // Moderate-excitation evaluation profile: full heading sweep with
        // vehicle-realistic roll/pitch, so scoring reflects operating
        // conditions rather than the calibration maneuver.
        const MotionProfile eval_profile =
            profile_for(MotionKind::MAM, derive_seed(run_seed, stream++));
        run.evaluation = synthesize(eval_profile, truth, derive_seed(run_seed, stream++));
        run.evaluation.label = "EVAL";
        out.push_back(std::move(run));
    }
    return out;
}

}  // namespace magyc
