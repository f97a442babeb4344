#pragma once

// Test-side reference implementations, kept independent of the library code
// they are used to check.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracles {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Matrix exponential by scaling and squaring with a Taylor core.
inline Mat3 expm(Mat3 a) {
  int squarings = 0;
  while (a.norm() > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline Mat3 rotation_about_z(double angle) {
  Mat3 r = Mat3::Identity();
  r(0, 0) = std::cos(angle);
  r(0, 1) = -std::sin(angle);
  r(1, 0) = std::sin(angle);
  r(1, 1) = std::cos(angle);
  return r;
}

inline Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

// Generic fixed-step RK4 over a flat state vector.
template <int N>
using StateVec = Eigen::Matrix<double, N, 1>;

template <int N>
StateVec<N> rk4(const std::function<StateVec<N>(double, const StateVec<N>&)>& rhs,
                StateVec<N> y, double t0, double t1, int steps) {
  const double dt = (t1 - t0) / steps;
  double t = t0;
  for (int k = 0; k < steps; ++k) {
    const StateVec<N> k1 = rhs(t, y);
    const StateVec<N> k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
    const StateVec<N> k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
    const StateVec<N> k4 = rhs(t + dt, y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
  }
  return y;
}

// Central difference gradient of a scalar function of a 2D point.
inline Eigen::Vector2d grad2(const std::function<double(const Eigen::Vector2d&)>& f,
                             const Eigen::Vector2d& p, double eps = 1e-6) {
  Eigen::Vector2d g;
  g.x() = (f(p + Eigen::Vector2d(eps, 0)) - f(p - Eigen::Vector2d(eps, 0))) / (2 * eps);
  g.y() = (f(p + Eigen::Vector2d(0, eps)) - f(p - Eigen::Vector2d(0, eps))) / (2 * eps);
  return g;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240817ull);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline Vec3 random_vec3(double scale = 1.0) {
  return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

}  // namespace oracles
