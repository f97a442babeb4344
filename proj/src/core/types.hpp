#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace rigidflow {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return s;
}

// Rodrigues formula, exact rotation about axis w by angle |w|*t.
inline Mat3 rotation_exp(const Vec3& w, double t) {
  const double theta = w.norm() * t;
  if (theta < 1e-300) return Mat3::Identity();
  const Vec3 axis = w.normalized();
  const Mat3 k = skew(axis);
  return Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
}

// C1 cubic ramp, 0 at t<=0, 1 at t>=1.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

inline double smoothstep_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t);
}

// C2 quintic ramp, 0 at t<=0, 1 at t>=1.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// C3 septic ramp for fields that get differentiated three times.
inline double smoothstep7(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t4 = t * t * t * t;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

inline double smoothstep7_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = t * (1.0 - t);
  return 140.0 * a * a * a;
}

inline Vec3 lift(const Vec2& p) { return Vec3(p.x(), p.y(), 0.0); }
inline Vec2 drop(const Vec3& p) { return Vec2(p.x(), p.y()); }

// Counterclockwise perpendicular.
inline Vec2 perp(const Vec2& p) { return Vec2(-p.y(), p.x()); }

}  // namespace rigidflow
