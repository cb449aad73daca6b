#pragma once

#include <cmath>

#include "magyc/types.hpp"

namespace magyc {

/// Skew-symmetric operator: skew(v)*u == v x u.
inline Mat3 skew(const Vec3& v) {
    Mat3 s;
    s <<     0.0, -v.z(),  v.y(),
           v.z(),    0.0, -v.x(),
          -v.y(),  v.x(),    0.0;
    return s;
}

/// Inverse of skew for (near-)antisymmetric matrices.
inline Vec3 vee(const Mat3& s) {
    return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

inline Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return r;
}

inline Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return r;
}

inline Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return r;
}

/// World-from-body rotation for Z-Y-X Euler angles (heading about Z,
/// then pitch about Y, then roll about X). Shared convention repo-wide.
inline Mat3 rotation_zyx(double roll, double pitch, double heading) {
    return rot_z(heading) * rot_y(pitch) * rot_x(roll);
}

/// Rodrigues exponential map.
inline Mat3 so3_exp(const Vec3& w) {
    const double th = w.norm();
    if (th < 1e-12) return Mat3::Identity() + skew(w);
    const Vec3 a = w / th;
    const Mat3 k = skew(a);
    return Mat3::Identity() + std::sin(th) * k + (1.0 - std::cos(th)) * k * k;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    double b = std::fmod(a + M_PI, two_pi);
    if (b <= 0.0) b += two_pi;
    return b - M_PI;
}

constexpr double deg_to_rad(double d) { return d * M_PI / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / M_PI; }

}  // namespace magyc
