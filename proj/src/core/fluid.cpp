#include "fluid.hpp"

#include <cmath>

#include "poisson.hpp"

namespace rigidflow {

void SolverParams::validate() const {
  if (eps < 0.0) throw Error(ErrorCode::ConfigInvalid, "eps must be nonnegative");
  if (!(eta_pen > 0.0)) throw Error(ErrorCode::ConfigInvalid, "eta_pen must be positive");
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
  if (!(cfl > 0.0) || cfl > 0.5)
    throw Error(ErrorCode::ConfigInvalid, "cfl must lie in (0, 0.5]");
  if (t_end < 0.0) throw Error(ErrorCode::ConfigInvalid, "t_end must be nonnegative");
  if (kappa < 0.0) throw Error(ErrorCode::ConfigInvalid, "kappa must be nonnegative");
}

const Snapshot& Trajectory::snapshot_at(double t, double tol) const {
  for (const Snapshot& s : snapshots)
    if (std::fabs(s.t - t) <= tol) return s;
  throw Error(ErrorCode::GridMismatch,
              "no snapshot stored at t=" + std::to_string(t));
}

BodyMask body_mask(const Grid& grid, const BodyShape& shape, const Placement& placement,
                   double width_cells) {
  BodyMask m;
  const double w = width_cells * grid.h;
  m.chi_u = Field2(grid.nx + 1, grid.ny);
  m.chi_v = Field2(grid.nx, grid.ny + 1);
  m.chi_c = Field2(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i)
      m.chi_u(i, j) = indicator(shape, placement, lift(grid.u_face(i, j)), w);
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      m.chi_v(i, j) = indicator(shape, placement, lift(grid.v_face(i, j)), w);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      m.chi_c(i, j) = indicator(shape, placement, lift(grid.center(i, j)), w);
  return m;
}

namespace {

// RK2 characteristic backtracking with clamped sampling.
Vec2 backtrack(const StaggeredField& f, const Vec2& pos, double dt) {
  const Vec2 v1 = f.sample_velocity(pos);
  const Vec2 mid = f.grid.clamp(pos - 0.5 * dt * v1);
  const Vec2 v2 = f.sample_velocity(mid);
  return f.grid.clamp(pos - dt * v2);
}

void advect(StaggeredField& f, double dt) {
  const Grid& g = f.grid;
  Field2 nu = f.u;
  Field2 nv = f.v;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      nu(i, j) = f.sample_u(backtrack(f, g.u_face(i, j), dt));
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      nv(i, j) = f.sample_v(backtrack(f, g.v_face(i, j), dt));
    }
  }
  f.u = std::move(nu);
  f.v = std::move(nv);
  f.enforce_wall_normals();
}

// Symmetric-gradient entries. D11, D22 live at cell centers, D12 at nodes
// and is zero on wall nodes (complete slip on the container walls).
struct StrainFields {
  Field2 d11, d22, d12;
};

StrainFields strain(const StaggeredField& f) {
  const Grid& g = f.grid;
  StrainFields s;
  s.d11 = Field2(g.nx, g.ny);
  s.d22 = Field2(g.nx, g.ny);
  s.d12 = Field2(g.nx + 1, g.ny + 1, 0.0);
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      s.d11(i, j) = (f.u(i + 1, j) - f.u(i, j)) * inv_h;
      s.d22(i, j) = (f.v(i, j + 1) - f.v(i, j)) * inv_h;
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double du_dy = (f.u(i, j) - f.u(i, j - 1)) * inv_h;
      const double dv_dx = (f.v(i, j) - f.v(i - 1, j)) * inv_h;
      s.d12(i, j) = 0.5 * (du_dy + dv_dx);
    }
  }
  return s;
}

}  // namespace

void apply_stress_divergence(const StaggeredField& f, double coef, Field2& out_u,
                             Field2& out_v) {
  const Grid& g = f.grid;
  const StrainFields s = strain(f);
  const double inv_h = 1.0 / g.h;
  if (!out_u.same_shape(f.u)) out_u = Field2(g.nx + 1, g.ny);
  if (!out_v.same_shape(f.v)) out_v = Field2(g.nx, g.ny + 1);
  out_u.fill(0.0);
  out_v.fill(0.0);
  // du/dt = 2 (d/dx D11 + d/dy D12), interior faces only.
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double ddx = (s.d11(i, j) - s.d11(i - 1, j)) * inv_h;
      const double ddy = (s.d12(i, j + 1) - s.d12(i, j)) * inv_h;
      out_u(i, j) = coef * 2.0 * (ddx + ddy);
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double ddx = (s.d12(i + 1, j) - s.d12(i, j)) * inv_h;
      const double ddy = (s.d22(i, j) - s.d22(i, j - 1)) * inv_h;
      out_v(i, j) = coef * 2.0 * (ddx + ddy);
    }
  }
}

double dissipation_functional(const StaggeredField& f, const BodyMask* mask) {
  const Grid& g = f.grid;
  const StrainFields s = strain(f);
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double w = mask ? 1.0 - mask->chi_c(i, j) : 1.0;
      acc += w * (s.d11(i, j) * s.d11(i, j) + s.d22(i, j) * s.d22(i, j));
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      double w = 1.0;
      if (mask) {
        // node weight from the four surrounding cell values
        const double c = 0.25 * (mask->chi_c(i - 1, j - 1) + mask->chi_c(i, j - 1) +
                                 mask->chi_c(i - 1, j) + mask->chi_c(i, j));
        w = 1.0 - c;
      }
      acc += w * 2.0 * s.d12(i, j) * s.d12(i, j);
    }
  }
  return 2.0 * acc * g.h * g.h;
}

double fluid_kinetic_energy(const StaggeredField& f, const BodyMask* mask) {
  const Grid& g = f.grid;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double w = mask ? 1.0 - mask->chi_u(i, j) : 1.0;
      acc += w * f.u(i, j) * f.u(i, j);
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = mask ? 1.0 - mask->chi_v(i, j) : 1.0;
      acc += w * f.v(i, j) * f.v(i, j);
    }
  return 0.5 * acc * g.h * g.h;
}

ProjectionStats project(StaggeredField& f, double dt, double rel_tol, int max_iters) {
  const Grid& g = f.grid;
  Field2 rhs(g.nx, g.ny);
  const double inv_dt = 1.0 / dt;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) rhs(i, j) = f.divergence(i, j) * inv_dt;

  const PoissonResult pr = solve_poisson_neumann(g, rhs, f.p, rel_tol, max_iters);

  const double scale = dt / g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) f.u(i, j) -= scale * (f.p(i, j) - f.p(i - 1, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.v(i, j) -= scale * (f.p(i, j) - f.p(i, j - 1));
  f.enforce_wall_normals();
  return {pr.residual, pr.iterations};
}

std::pair<Vec3, Vec3> fluid_force_on_body(const CoupledState& state,
                                          const SolverParams& params,
                                          const BodyShape& shape) {
  const Grid& g = state.fluid.grid;
  const BodyMask mask =
      body_mask(g, shape, state.body.placement(), params.chi_width_cells);
  const double inv_eta = 1.0 / params.eta_pen;
  const double cell = g.h * g.h;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const double chi = mask.chi_u(i, j);
      if (chi == 0.0) continue;
      const Vec2 pos = g.u_face(i, j);
      const Vec3 ub = rigid_velocity(state.body, lift(pos));
      const double fx = inv_eta * chi * (state.fluid.u(i, j) - ub.x()) * cell;
      force.x() += fx;
      torque.z() += -(pos.y() - state.body.X.y()) * fx;
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double chi = mask.chi_v(i, j);
      if (chi == 0.0) continue;
      const Vec2 pos = g.v_face(i, j);
      const Vec3 ub = rigid_velocity(state.body, lift(pos));
      const double fy = inv_eta * chi * (state.fluid.v(i, j) - ub.y()) * cell;
      force.y() += fy;
      torque.z() += (pos.x() - state.body.X.x()) * fy;
    }
  }
  return {force, torque};
}

PenalizationResult penalize(StaggeredField& f, const RigidState& body,
                            const SolverParams& params, const BodyShape& shape) {
  const Grid& g = f.grid;
  const BodyMask mask = body_mask(g, shape, body.placement(), params.chi_width_cells);
  const double rate = params.dt / params.eta_pen;
  const double inv_eta = 1.0 / params.eta_pen;
  const double cell = g.h * g.h;
  PenalizationResult out;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double chi = mask.chi_u(i, j);
      if (chi == 0.0) continue;
      const Vec2 pos = g.u_face(i, j);
      const double ub = rigid_velocity(body, lift(pos)).x();
      const double rel = f.u(i, j) - ub;
      out.force.x() += inv_eta * chi * rel * cell;
      out.torque.z() += -(pos.y() - body.X.y()) * inv_eta * chi * rel * cell;
      out.residual += chi * rel * rel * cell;
      f.u(i, j) -= rate * chi * rel;
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double chi = mask.chi_v(i, j);
      if (chi == 0.0) continue;
      const Vec2 pos = g.v_face(i, j);
      const double ub = rigid_velocity(body, lift(pos)).y();
      const double rel = f.v(i, j) - ub;
      out.force.y() += inv_eta * chi * rel * cell;
      out.torque.z() += (pos.x() - body.X.x()) * inv_eta * chi * rel * cell;
      out.residual += chi * rel * rel * cell;
      f.v(i, j) -= rate * chi * rel;
    }
  }
  return out;
}

StepStats step_coupled(CoupledState& state, const SolverParams& params,
                       const MassProperties& mp, const BodyShape& shape,
                       const Container& container, bool with_body) {
  StepStats st;
  const Grid& g = state.fluid.grid;
  const double dt = params.dt;

  st.max_speed = state.fluid.max_speed();
  if (st.max_speed * dt / g.h > params.cfl + 1e-12)
    throw Error(ErrorCode::CflViolation,
                "max speed " + std::to_string(st.max_speed) + " breaks the CFL target at t=" +
                    std::to_string(state.time));

  advect(state.fluid, dt);

  if (params.eps > 0.0) {
    // Tally before the update so the explicit overshoot stays on the
    // dissipative side of the energy budget.
    BodyMask mask_pre;
    const BodyMask* mask_ptr = nullptr;
    if (with_body) {
      mask_pre = body_mask(g, shape, state.body.placement(), params.chi_width_cells);
      mask_ptr = &mask_pre;
    }
    st.dissipation_increment =
        dt * params.eps * dissipation_functional(state.fluid, mask_ptr);
    Field2 su, sv;
    apply_stress_divergence(state.fluid, params.eps, su, sv);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) state.fluid.u(i, j) += dt * su(i, j);
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) state.fluid.v(i, j) += dt * sv(i, j);
  }

  if (with_body) {
    const PenalizationResult pr = penalize(state.fluid, state.body, params, shape);
    st.force = pr.force;
    st.torque = pr.torque;
    st.penal_residual = pr.residual;
  }

  const ProjectionStats ps =
      project(state.fluid, dt, params.poisson_tol, params.poisson_max_iters);
  st.poisson_residual = ps.residual;
  st.poisson_iters = ps.iterations;

  if (with_body) {
    state.body = step_rigid(state.body, mp, st.force, st.torque, dt);
    const double gap = boundary_gap(state.body.placement(), shape, container);
    if (gap <= params.kappa / 2.0)
      throw Error(ErrorCode::CollisionMargin,
                  "body reached the collision margin at t=" +
                      std::to_string(state.time + dt) + " (gap " + std::to_string(gap) +
                      ")");
  }

  state.time += dt;
  return st;
}

Trajectory run_coupled(const CoupledState& initial, const SolverParams& params,
                       const MassProperties& mp, const BodyShape& shape,
                       const Container& container,
                       const std::vector<double>& output_times, bool with_body) {
  params.validate();
  Trajectory tr;
  tr.grid = initial.fluid.grid;
  tr.container = container;
  tr.shape = shape;
  tr.mp = mp;
  tr.params = params;
  tr.has_body = with_body;

  CoupledState state = initial;
  double dissipation_cum = 0.0;
  double penal_residual = 0.0;

  auto record_row = [&](double t) {
    EnergyRow row;
    row.t = t;
    BodyMask mask;
    const BodyMask* mask_ptr = nullptr;
    if (with_body) {
      mask = body_mask(tr.grid, shape, state.body.placement(), params.chi_width_cells);
      mask_ptr = &mask;
    }
    row.e_fluid = fluid_kinetic_energy(state.fluid, mask_ptr);
    row.e_body = with_body ? body_kinetic_energy(mp, state.body) : 0.0;
    row.dissipation_cum = dissipation_cum;
    row.penal_residual = penal_residual;
    row.max_speed = state.fluid.max_speed();
    tr.energy.push_back(row);
    tr.step_times.push_back(t);
    tr.body_states.push_back(state.body);
  };

  auto maybe_snapshot = [&](double t) {
    for (double to : output_times) {
      if (std::fabs(to - t) <= 0.5 * params.dt * (1.0 + 1e-9)) {
        if (!tr.snapshots.empty() && std::fabs(tr.snapshots.back().t - t) < 1e-12) return;
        tr.snapshots.push_back({t, state.fluid, state.body, dissipation_cum});
        return;
      }
    }
  };

  record_row(state.time);
  maybe_snapshot(state.time);

  const long n_steps = std::lround(params.t_end / params.dt);
  for (long k = 0; k < n_steps; ++k) {
    StepStats st;
    try {
      st = step_coupled(state, params, mp, shape, container, with_body);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CollisionMargin) {
        tr.termination = "CollisionMargin";
        return tr;
      }
      throw;
    }
    dissipation_cum += st.dissipation_increment;
    penal_residual = st.penal_residual;
    record_row(state.time);
    maybe_snapshot(state.time);
  }
  tr.termination = "t_end";
  return tr;
}

}  // namespace rigidflow
