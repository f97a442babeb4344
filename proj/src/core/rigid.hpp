#pragma once

#include "geometry.hpp"
#include "types.hpp"

namespace rigidflow {

struct RigidState {
  Vec3 X = Vec3::Zero();
  Mat3 O = Mat3::Identity();
  Vec3 V = Vec3::Zero();
  Vec3 w = Vec3::Zero();

  Placement placement() const { return Placement{X, O}; }
};

struct MassProperties {
  double m = 0.0;
  Vec3 X0 = Vec3::Zero();     // mass center in the body frame
  Mat3 J_body = Mat3::Zero();  // inertia about the mass center, body frame
};

// Gram-Schmidt with det fix, keeps O in SO(3).
Mat3 orthonormalize(const Mat3& O);

// Midpoint quadrature over the reference body; `resolution` 0 picks a
// default per shape. Throws QuadratureNotConverged when one refinement
// step still moves the result by more than 1e-4 relative.
MassProperties mass_properties(const BodyShape& shape, int resolution = 0);

inline Vec3 rigid_velocity(const RigidState& s, const Vec3& x) {
  return s.V + s.w.cross(x - s.X);
}

inline Mat3 inertia_current(const MassProperties& mp, const Mat3& O) {
  return O * mp.J_body * O.transpose();
}

// One RK4 step of the free-body system with prescribed force and torque,
// rotation updated through dO/dt = skew(w) O and re-orthonormalized.
RigidState step_rigid(const RigidState& s, const MassProperties& mp,
                      const Vec3& force, const Vec3& torque, double dt);

// One RK4 step of the transformed body velocities (V^s, w^s) with the
// gyroscopic coupling against the reference angular velocity w1. J1 is the
// current-frame inertia, held fixed over the step.
void step_transformed_rigid(Vec3& Vs, Vec3& ws, const Vec3& w1, const Mat3& J1,
                            double m, const Vec3& pressure_force,
                            const Vec3& pressure_torque, double dt);

// 0.5 * integral of rho_B |u_B|^2 by direct quadrature over the body,
// independent of the m/J shortcut.
double body_kinetic_energy_quadrature(const BodyShape& shape, const RigidState& s,
                                      int resolution = 1500);

// 0.5 m |V|^2 + 0.5 (J w, w) with J in the current frame.
double body_kinetic_energy(const MassProperties& mp, const RigidState& s);

}  // namespace rigidflow
