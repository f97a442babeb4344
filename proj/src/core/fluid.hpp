#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"
#include "grid.hpp"
#include "rigid.hpp"

namespace rigidflow {

struct SolverParams {
  double eps = 0.0;       // kinematic viscosity
  double eta_pen = 1e-2;  // penalization time scale
  double dt = 1e-3;
  double cfl = 0.4;
  double t_end = 1.0;
  double kappa = 0.1;            // collision margin
  double chi_width_cells = 1.5;  // smoothed indicator width in cells
  double poisson_tol = 1e-10;
  int poisson_max_iters = 0;

  void validate() const;
};

struct CoupledState {
  StaggeredField fluid;
  RigidState body;
  double time = 0.0;
};

struct StepStats {
  double dissipation_increment = 0.0;  // dt * 2 eps int_F |D(u)|^2
  double penal_residual = 0.0;         // int chi |u - u_B|^2
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double max_speed = 0.0;
  double poisson_residual = 0.0;
  int poisson_iters = 0;
};

struct EnergyRow {
  double t = 0.0;
  double e_fluid = 0.0;
  double e_body = 0.0;
  double dissipation_cum = 0.0;
  double penal_residual = 0.0;
  double max_speed = 0.0;
};

struct Snapshot {
  double t = 0.0;
  StaggeredField fluid;
  RigidState body;
  double dissipation_cum = 0.0;
};

struct Trajectory {
  Grid grid;
  Container container;
  BodyShape shape = BodyShape::disk(1.0);
  MassProperties mp;
  SolverParams params;
  bool has_body = true;

  std::vector<double> step_times;        // every step, starting at t=0
  std::vector<RigidState> body_states;   // aligned with step_times
  std::vector<EnergyRow> energy;         // aligned with step_times
  std::vector<Snapshot> snapshots;       // at requested output times
  std::string termination = "t_end";

  double initial_energy() const {
    return energy.empty() ? 0.0 : energy.front().e_fluid + energy.front().e_body;
  }
  const Snapshot& snapshot_at(double t, double tol = 1e-9) const;
};

// Smoothed body indicator sampled on u faces, v faces and cell centers.
struct BodyMask {
  Field2 chi_u, chi_v, chi_c;
};
BodyMask body_mask(const Grid& grid, const BodyShape& shape, const Placement& placement,
                   double width_cells);

// One operator-split step: advect, diffuse, penalize, project, move body,
// check the collision margin. Mutates `state` and returns step statistics.
StepStats step_coupled(CoupledState& state, const SolverParams& params,
                       const MassProperties& mp, const BodyShape& shape,
                       const Container& container, bool with_body = true);

// Penalization exchange force and torque about the body center, computed from
// the current fields without mutating them.
std::pair<Vec3, Vec3> fluid_force_on_body(const CoupledState& state,
                                          const SolverParams& params,
                                          const BodyShape& shape);

struct PenalizationResult {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double residual = 0.0;  // int chi |u - u_B|^2 before the update
};

// Relaxes the masked velocity toward the rigid field by dt/eta_pen and
// returns the exchange force/torque evaluated on the pre-update field.
PenalizationResult penalize(StaggeredField& f, const RigidState& body,
                            const SolverParams& params, const BodyShape& shape);

// Integral of 2 |D(u)|^2 weighted by (1 - chi); chi may be null for the
// whole-domain value. D12 vanishes on wall nodes (slip walls).
double dissipation_functional(const StaggeredField& f, const BodyMask* mask);

// Energy of the fluid outside the body, 0.5 int (1 - chi) |u|^2.
double fluid_kinetic_energy(const StaggeredField& f, const BodyMask* mask);

// Applies the discrete div(2 D(u)) operator (slip walls) scaled by coef
// into (out_u, out_v). Used by the diffusion step and its energy tally.
void apply_stress_divergence(const StaggeredField& f, double coef, Field2& out_u,
                             Field2& out_v);

// Chorin projection to the discrete divergence-free space; returns the
// pressure solve stats. The pressure field of `f` is replaced.
struct ProjectionStats {
  double residual = 0.0;
  int iterations = 0;
};
ProjectionStats project(StaggeredField& f, double dt, double rel_tol = 1e-9,
                        int max_iters = 0);

// Runs until t_end or the collision margin, recording per-step energy rows
// and snapshots at the requested times (clamped to the step grid).
Trajectory run_coupled(const CoupledState& initial, const SolverParams& params,
                       const MassProperties& mp, const BodyShape& shape,
                       const Container& container,
                       const std::vector<double>& output_times, bool with_body = true);

}  // namespace rigidflow
