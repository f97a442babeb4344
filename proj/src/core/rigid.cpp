#include "rigid.hpp"

#include <cmath>

namespace rigidflow {

Mat3 orthonormalize(const Mat3& O) {
  Vec3 c0 = O.col(0).normalized();
  Vec3 c1 = (O.col(1) - c0 * c0.dot(O.col(1))).normalized();
  Vec3 c2 = c0.cross(c1);
  Mat3 R;
  R.col(0) = c0;
  R.col(1) = c1;
  R.col(2) = c2;
  return R;
}

namespace {

struct Moments {
  double m = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();  // integral of rho * r r^T
};

double smoothed_weight(double d, double s) { return smoothstep(0.5 - d / s); }

// 4-point Gauss-Legendre nodes/weights on [-1/2, 1/2].
constexpr double kGaussPt[4] = {-0.43056815579702629, -0.16999052179242816,
                                0.16999052179242816, 0.43056815579702629};
constexpr double kGaussWt[4] = {0.17392742256872693, 0.32607257743127307,
                                0.32607257743127307, 0.17392742256872693};

// Quintic ramp of width 3h with per-cell Gauss quadrature across the ramp
// band. Plain midpoint sampling of the ramp is phase-coherent along edges
// that align with the lattice, which stalls convergence for polygons.
Moments planar_moments(const BodyShape& shape, int n) {
  const double R = shape.bounding_radius() * 1.05;
  const double h = 2.0 * R / n;
  const double s = 3.0 * h;
  const double band = s + 0.75 * h * M_SQRT2;
  Moments mo;
  auto accumulate = [&](const Vec2& q, double chi) {
    const double rho = shape.density_at(lift(q)) * chi;
    const Vec3 r = lift(q);
    mo.m += rho;
    mo.first += rho * r;
    mo.second += rho * r * r.transpose();
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 q(-R + (i + 0.5) * h, -R + (j + 0.5) * h);
      const double d = shape.signed_distance_local(lift(q));
      if (d > band) continue;
      if (d < -band) {
        accumulate(q, 1.0);
        continue;
      }
      for (int gy = 0; gy < 4; ++gy) {
        for (int gx = 0; gx < 4; ++gx) {
          const Vec2 qq = q + h * Vec2(kGaussPt[gx], kGaussPt[gy]);
          const double dd = shape.signed_distance_local(lift(qq));
          const double chi = smoothstep5(0.5 - dd / s);
          if (chi > 0.0) accumulate(qq, chi * kGaussWt[gx] * kGaussWt[gy]);
        }
      }
    }
  }
  const double w = h * h;
  mo.m *= w;
  mo.first *= w;
  mo.second *= w;
  return mo;
}

Moments ball_moments(const BodyShape& shape, int n) {
  const double R = shape.bounding_radius() * 1.05;
  const double h = 2.0 * R / n;
  const double s = 1.5 * h;
  Moments mo;
  for (int k = 0; k < n; ++k) {
    const double z = -R + (k + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec3 q(-R + (i + 0.5) * h, -R + (j + 0.5) * h, z);
        const double d = shape.signed_distance_local(q);
        if (d > s) continue;
        const double chi = smoothed_weight(d, s);
        if (chi == 0.0) continue;
        const double rho = shape.density_at(q) * chi;
        mo.m += rho;
        mo.first += rho * q;
        mo.second += rho * q * q.transpose();
      }
    }
  }
  const double w = h * h * h;
  mo.m *= w;
  mo.first *= w;
  mo.second *= w;
  return mo;
}

MassProperties from_moments(const Moments& mo) {
  MassProperties mp;
  mp.m = mo.m;
  mp.X0 = mo.first / mo.m;
  // Shift the second moment to the mass center, then J = tr(S) I - S.
  const Mat3 s_centered = mo.second - mo.m * mp.X0 * mp.X0.transpose();
  mp.J_body = s_centered.trace() * Mat3::Identity() - s_centered;
  return mp;
}

}  // namespace

MassProperties mass_properties(const BodyShape& shape, int resolution) {
  const bool planar = shape.planar();
  int n = resolution > 0 ? resolution : (planar ? 1536 : 448);
  if (n % 2) ++n;

  const Moments fine = planar ? planar_moments(shape, n) : ball_moments(shape, n);
  const Moments half = planar ? planar_moments(shape, n / 2) : ball_moments(shape, n / 2);
  if (!(fine.m > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "body has nonpositive mass");

  const double drift_m = std::fabs(fine.m - half.m) / fine.m;
  const double drift_j =
      (fine.second - half.second).norm() / std::max(fine.second.norm(), 1e-300);
  if (std::max(drift_m, drift_j) > 1e-4)
    throw Error(ErrorCode::QuadratureNotConverged,
                "mass property quadrature drift " +
                    std::to_string(std::max(drift_m, drift_j)) + " at resolution " +
                    std::to_string(n));

  // One Richardson step; the smoothed-indicator bias is O(h^2).
  Moments extr;
  extr.m = (4.0 * fine.m - half.m) / 3.0;
  extr.first = (4.0 * fine.first - half.first) / 3.0;
  extr.second = (4.0 * fine.second - half.second) / 3.0;
  return from_moments(extr);
}

namespace {

struct RigidDeriv {
  Vec3 dX, dV, dw;
  Mat3 dO;
};

RigidDeriv rigid_rhs(const RigidState& s, const MassProperties& mp, const Vec3& force,
                     const Vec3& torque) {
  RigidDeriv d;
  d.dX = s.V;
  d.dO = skew(s.w) * s.O;
  d.dV = force / mp.m;
  const Mat3 J = inertia_current(mp, s.O);
  d.dw = J.ldlt().solve((J * s.w).cross(s.w) + torque);
  return d;
}

RigidState advance(const RigidState& s, const RigidDeriv& d, double dt) {
  RigidState r = s;
  r.X += dt * d.dX;
  r.O += dt * d.dO;
  r.V += dt * d.dV;
  r.w += dt * d.dw;
  return r;
}

}  // namespace

RigidState step_rigid(const RigidState& s, const MassProperties& mp, const Vec3& force,
                      const Vec3& torque, double dt) {
  const RigidDeriv k1 = rigid_rhs(s, mp, force, torque);
  const RigidDeriv k2 = rigid_rhs(advance(s, k1, 0.5 * dt), mp, force, torque);
  const RigidDeriv k3 = rigid_rhs(advance(s, k2, 0.5 * dt), mp, force, torque);
  const RigidDeriv k4 = rigid_rhs(advance(s, k3, dt), mp, force, torque);

  RigidState out = s;
  out.X += dt / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
  out.O += dt / 6.0 * (k1.dO + 2.0 * k2.dO + 2.0 * k3.dO + k4.dO);
  out.V += dt / 6.0 * (k1.dV + 2.0 * k2.dV + 2.0 * k3.dV + k4.dV);
  out.w += dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  out.O = orthonormalize(out.O);
  return out;
}

void step_transformed_rigid(Vec3& Vs, Vec3& ws, const Vec3& w1, const Mat3& J1, double m,
                            const Vec3& pressure_force, const Vec3& pressure_torque,
                            double dt) {
  const Eigen::LDLT<Mat3> J1solver(J1);
  auto rhs = [&](const Vec3& V, const Vec3& w, Vec3& dV, Vec3& dw) {
    dV = -(w - w1).cross(V) + pressure_force / m;
    dw = J1solver.solve((J1 * w).cross(w) - (w - w1).cross(J1 * w) + pressure_torque);
  };
  Vec3 k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
  rhs(Vs, ws, k1v, k1w);
  rhs(Vs + 0.5 * dt * k1v, ws + 0.5 * dt * k1w, k2v, k2w);
  rhs(Vs + 0.5 * dt * k2v, ws + 0.5 * dt * k2w, k3v, k3w);
  rhs(Vs + dt * k3v, ws + dt * k3w, k4v, k4w);
  Vs += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  ws += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
}

double body_kinetic_energy_quadrature(const BodyShape& shape, const RigidState& s,
                                      int resolution) {
  const double R = shape.bounding_radius() * 1.05;
  const bool planar = shape.planar();
  const int n = planar ? resolution : std::min(resolution, 192);
  const double h = 2.0 * R / n;
  const double sm = 1.5 * h;
  double acc = 0.0;
  const int nz = planar ? 1 : n;
  for (int k = 0; k < nz; ++k) {
    const double z = planar ? 0.0 : -R + (k + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec3 q(-R + (i + 0.5) * h, -R + (j + 0.5) * h, z);
        const double d = shape.signed_distance_local(q);
        if (d > sm) continue;
        const double chi = smoothed_weight(d, sm);
        if (chi == 0.0) continue;
        const Vec3 u = s.V + s.w.cross(s.O * q);
        acc += chi * shape.density_at(q) * u.squaredNorm();
      }
    }
  }
  const double w = planar ? h * h : h * h * h;
  return 0.5 * acc * w;
}

double body_kinetic_energy(const MassProperties& mp, const RigidState& s) {
  const Mat3 J = inertia_current(mp, s.O);
  return 0.5 * mp.m * s.V.squaredNorm() + 0.5 * s.w.dot(J * s.w);
}

}  // namespace rigidflow
