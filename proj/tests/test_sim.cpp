#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magyc/model.hpp"
#include "magyc/sim.hpp"
#include "magyc/so3.hpp"

using namespace magyc;

TEST_CASE("profile amplitudes per dataset family") {
    const MotionProfile wam = profile_for(MotionKind::WAM, 1);
    CHECK(wam.roll.amplitude_rad == doctest::Approx(M_PI));
    CHECK(wam.heading.amplitude_rad == doctest::Approx(M_PI));
    CHECK(wam.pitch.amplitude_rad == doctest::Approx(deg_to_rad(89.0)));
    CHECK(wam.pitch_clamped);

    const MotionProfile mam = profile_for(MotionKind::MAM, 1);
    CHECK(mam.roll.amplitude_rad == doctest::Approx(deg_to_rad(5.0)));
    CHECK(mam.pitch.amplitude_rad == doctest::Approx(deg_to_rad(45.0)));
    CHECK(mam.heading.amplitude_rad == doctest::Approx(M_PI));
    CHECK_FALSE(mam.pitch_clamped);

    const MotionProfile lam = profile_for(MotionKind::LAM, 1);
    CHECK(lam.roll.amplitude_rad == doctest::Approx(deg_to_rad(5.0)));
    CHECK(lam.pitch.amplitude_rad == doctest::Approx(deg_to_rad(15.0)));
    CHECK(lam.heading.amplitude_rad == doctest::Approx(deg_to_rad(90.0)));
}

TEST_CASE("profiles are deterministic per seed") {
    const MotionProfile a = profile_for(MotionKind::WAM, 99);
    const MotionProfile b = profile_for(MotionKind::WAM, 99);
    CHECK(a.roll.phase_rad == b.roll.phase_rad);
    CHECK(a.pitch.phase_rad == b.pitch.phase_rad);
    CHECK(a.heading.phase_rad == b.heading.phase_rad);
    const MotionProfile c = profile_for(MotionKind::WAM, 100);
    CHECK(a.roll.phase_rad != c.roll.phase_rad);
}

TEST_CASE("attitude is the sinusoid of the profile") {
    MotionProfile p = profile_for(MotionKind::WAM, 5);
    p.roll.phase_rad = 0.0;
    p.pitch.phase_rad = 0.0;
    p.heading.phase_rad = 0.0;
    CHECK(attitude_at(p, 0.0).norm() == 0.0);  // sin(0) on every axis

    // heading amplitude pi, evaluated where its sin argument is pi/2
    const double t_quarter = 0.25 / p.heading.frequency_hz;
    CHECK(attitude_at(p, t_quarter).z() == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("attitude stays within amplitudes over the full duration") {
    const MotionProfile p = profile_for(MotionKind::WAM, 17);
    for (int i = 0; i <= 4000; ++i) {
        const double t = p.duration_s * i / 4000.0;
        const Vec3 euler = attitude_at(p, t);
        CHECK(std::abs(euler.x()) <= p.roll.amplitude_rad + 1e-12);
        CHECK(std::abs(euler.y()) <= p.pitch.amplitude_rad + 1e-12);
        CHECK(std::abs(euler.z()) <= p.heading.amplitude_rad + 1e-12);
    }
}

TEST_CASE("attitude outside the duration is rejected") {
    const MotionProfile p = profile_for(MotionKind::WAM, 17);
    CHECK_THROWS_AS((void)attitude_at(p, -1.0), Error);
    CHECK_THROWS_AS((void)attitude_at(p, p.duration_s + 1.0), Error);
}

TEST_CASE("angular rate of a static profile is zero") {
    MotionProfile p = profile_for(MotionKind::WAM, 5);
    p.roll.amplitude_rad = 0.0;
    p.pitch.amplitude_rad = 0.0;
    p.heading.amplitude_rad = 0.0;
    CHECK(angular_rate_at(p, 10.0).norm() == 0.0);
}

TEST_CASE("heading-only motion spins about the body z axis") {
    MotionProfile p = profile_for(MotionKind::MAM, 5);
    p.roll.amplitude_rad = 0.0;
    p.pitch.amplitude_rad = 0.0;
    p.heading.phase_rad = 0.3;
    for (double t : {0.0, 7.0, 131.0}) {
        const Vec3 w = angular_rate_at(p, t);
        const double arg = 2.0 * M_PI * p.heading.frequency_hz * t + p.heading.phase_rad;
        const double psi_dot =
            p.heading.amplitude_rad * 2.0 * M_PI * p.heading.frequency_hz * std::cos(arg);
        CHECK(w.x() == doctest::Approx(0.0));
        CHECK(w.y() == doctest::Approx(0.0));
        CHECK(w.z() == doctest::Approx(psi_dot).epsilon(1e-12));
    }
}

TEST_CASE("angular rate matches the finite-difference rotation oracle") {
    const MotionProfile p = profile_for(MotionKind::WAM, 23);
    const double h = 1e-6;
    for (double t : {1.0, 13.7, 100.0, 250.3, 399.0}) {
        const Vec3 e0 = attitude_at(p, t - h);
        const Vec3 e1 = attitude_at(p, t + h);
        const Mat3 r0 = rotation_zyx(e0.x(), e0.y(), e0.z());
        const Mat3 r1 = rotation_zyx(e1.x(), e1.y(), e1.z());
        const Vec3 e = attitude_at(p, t);
        const Mat3 r = rotation_zyx(e.x(), e.y(), e.z());
        const Mat3 r_dot = (r1 - r0) / (2.0 * h);
        const Vec3 w_numeric = vee(r.transpose() * r_dot);
        CHECK((angular_rate_at(p, t) - w_numeric).norm() < 1e-4);
    }
}

TEST_CASE("synthesize: static identity scenario reproduces the world field") {
    SimulationTruth truth;
    truth.m0 = Vec3(227, 52, 412);
    truth.a = SoftIronTerms::identity();
    MotionProfile p = profile_for(MotionKind::WAM, 2);
    p.roll.amplitude_rad = 0.0;
    p.pitch.amplitude_rad = 0.0;
    p.heading.amplitude_rad = 0.0;
    p.duration_s = 4.0;
    const Dataset ds = synthesize(p, truth, 3);
    REQUIRE(ds.samples.size() == 100);
    for (const auto& s : ds.samples) {
        CHECK((s.m - truth.m0).norm() < 1e-12);
        CHECK(s.w.norm() == 0.0);
    }
}

TEST_CASE("synthesize: 400 s at 25 Hz gives 10,000 samples with attitude") {
    const SimulationTruth truth = SimulationTruth::reference();
    const Dataset ds = synthesize(profile_for(MotionKind::MAM, 8), truth, 9);
    CHECK(ds.samples.size() == 10000);
    CHECK(ds.has_attitude());
    CHECK(ds.truth.has_value());
}

TEST_CASE("noise-free correction recovers the rotating world field") {
    SimulationTruth truth = SimulationTruth::reference();
    truth.sigma_mag = 0.0;
    truth.sigma_gyro = 0.0;
    const MotionProfile p = profile_for(MotionKind::WAM, 14);
    const Dataset ds = synthesize(p, truth, 15);
    const CalibrationState xt = truth.to_state();
    const double field = truth.m0.norm();
    CHECK(field == doctest::Approx(473.262).epsilon(1e-4));
    for (std::size_t i = 0; i < ds.samples.size(); i += 503) {
        const Vec3 corrected = correct_measurement(xt, ds.samples[i].m);
        const auto& att = ds.attitude[i];
        const Vec3 expected =
            rotation_zyx(att.roll, att.pitch, att.heading).transpose() * truth.m0;
        CHECK((corrected - expected).norm() < 1e-9 * field);
        CHECK(std::abs(corrected.norm() - field) < 1e-9 * field);
    }
}

TEST_CASE("noise-free magnetometer samples lie on the soft-iron ellipsoid") {
    SimulationTruth truth = SimulationTruth::reference();
    truth.sigma_mag = 0.0;
    truth.sigma_gyro = 0.0;
    const Dataset ds = synthesize(profile_for(MotionKind::WAM, 40), truth, 41);
    const Mat3 a = truth.soft_iron();
    const Mat3 shape = (a * a.transpose()).inverse();
    const Vec3 center = truth.hard_iron();
    const double radius_sq = truth.m0.squaredNorm();
    for (std::size_t i = 0; i < ds.samples.size(); i += 211) {
        const Vec3 d = ds.samples[i].m - center;
        CHECK(std::abs(d.dot(shape * d) - radius_sq) < 1e-9 * radius_sq);
    }
}

TEST_CASE("gyro samples integrate back to the analytic attitude") {
    SimulationTruth truth = SimulationTruth::reference();
    truth.sigma_mag = 0.0;
    truth.sigma_gyro = 0.0;
    const MotionProfile p = profile_for(MotionKind::WAM, 33);
    const Dataset ds = synthesize(p, truth, 34);
    const double dt = 1.0 / p.rate_hz;
    const Vec3 e0 = attitude_at(p, 0.0);
    Mat3 r = rotation_zyx(e0.x(), e0.y(), e0.z());
    for (std::size_t i = 0; i + 1 < ds.samples.size(); ++i) {
        const Vec3 w_mid =
            0.5 * (ds.samples[i].w + ds.samples[i + 1].w) - truth.w_b;  // trapezoid
        r = r * so3_exp(w_mid * dt);
    }
    const Vec3 ef = attitude_at(p, ds.samples.back().t);
    const Mat3 rf = rotation_zyx(ef.x(), ef.y(), ef.z());
    const double angle = std::acos(std::clamp(((rf.transpose() * r).trace() - 1.0) / 2.0,
                                              -1.0, 1.0));
    CHECK(rad_to_deg(angle) < 0.5);
}

TEST_CASE("empirical noise matches the configured sigmas within 5%") {
    SimulationTruth truth = SimulationTruth::reference();
    MotionProfile p = profile_for(MotionKind::WAM, 50);
    p.roll.amplitude_rad = 0.0;
    p.pitch.amplitude_rad = 0.0;
    p.heading.amplitude_rad = 0.0;  // static: departures are pure noise
    const Dataset ds = synthesize(p, truth, 51);
    const Vec3 mag_mean = truth.soft_iron() * (truth.m0 + truth.m_b);
    double mag_var = 0.0, gyro_var = 0.0;
    for (const auto& s : ds.samples) {
        mag_var += (s.m - mag_mean).squaredNorm();
        gyro_var += (s.w - truth.w_b).squaredNorm();
    }
    mag_var /= 3.0 * static_cast<double>(ds.samples.size());
    gyro_var /= 3.0 * static_cast<double>(ds.samples.size());
    CHECK(std::sqrt(mag_var) == doctest::Approx(truth.sigma_mag).epsilon(0.05));
    CHECK(std::sqrt(gyro_var) == doctest::Approx(truth.sigma_gyro).epsilon(0.05));
}

TEST_CASE("identical seeds produce identical datasets") {
    const SimulationTruth truth = SimulationTruth::reference();
    const MotionProfile p = profile_for(MotionKind::MAM, 60);
    const Dataset a = synthesize(p, truth, 61);
    const Dataset b = synthesize(p, truth, 61);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); i += 97) {
        CHECK((a.samples[i].m - b.samples[i].m).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.samples[i].w - b.samples[i].w).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("monte carlo run layout and seed separation") {
    const SimulationTruth truth = SimulationTruth::reference();
    const MotionKind kinds[] = {MotionKind::WAM, MotionKind::MAM, MotionKind::LAM};
    const auto runs = monte_carlo(kinds, truth, 1, 7);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].calibration.size() == 3);
    CHECK(runs[0].evaluation.samples.size() == 10000);
    CHECK(runs[0].evaluation.label == "EVAL");

    // disjoint streams: first samples differ across datasets
    const Vec3 first_wam = runs[0].calibration.at(MotionKind::WAM).samples[0].m;
    const Vec3 first_mam = runs[0].calibration.at(MotionKind::MAM).samples[0].m;
    const Vec3 first_eval = runs[0].evaluation.samples[0].m;
    CHECK((first_wam - first_mam).norm() > 0.0);
    CHECK((first_wam - first_eval).norm() > 0.0);

    // distinct runs use distinct derived seeds
    const auto more = monte_carlo(kinds, truth, 2, 7);
    CHECK((more[0].evaluation.samples[0].m - more[1].evaluation.samples[0].m).norm() > 0.0);
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
}

TEST_CASE("monte carlo rejects zero runs") {
    const MotionKind kinds[] = {MotionKind::WAM};
    CHECK_THROWS_AS((void)monte_carlo(kinds, SimulationTruth::reference(), 0, 1), Error);
}
