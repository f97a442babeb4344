#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fluid.hpp"
#include "geometry.hpp"
#include "rigid.hpp"

namespace rigidflow {

// Body trajectory with linear interpolation between stored states.
class BodyMotion {
 public:
  BodyMotion() = default;
  BodyMotion(std::vector<double> times, std::vector<RigidState> states);
  static BodyMotion constant(const RigidState& s, double t_end);

  RigidState at(double t) const;
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<RigidState>& states() const { return states_; }

 private:
  std::vector<double> times_;
  std::vector<RigidState> states_;
};

struct CutoffSpec {
  double inner = 0.0;  // zeta == 1 within this margin around the body
  double outer = 0.0;  // zeta == 0 where the wall proxy drops below this
};

// Cutoff-extended rigid velocity. zeta follows the body's bounding circle and
// dies near the container wall; the curl form grad-perp(zeta psi) keeps the
// extension exactly divergence free in 2D.
class LambdaProvider {
 public:
  LambdaProvider(BodyMotion motion, double body_radius, const Container& box,
                 const CutoffSpec& margins);

  double zeta(double t, const Vec2& x) const;
  Vec2 zeta_gradient(double t, const Vec2& x) const;
  Vec2 rigid_extension(double t, const Vec2& x) const;  // zeta * u_B, no correction
  Vec2 velocity(double t, const Vec2& x) const;         // grad-perp(zeta psi)
  Vec2 operator()(double t, const Vec2& x) const { return velocity(t, x); }

  const BodyMotion& motion() const { return motion_; }
  const CutoffSpec& margins() const { return margins_; }
  const Container& box() const { return box_; }
  double body_radius() const { return body_radius_; }

 private:
  double stream(const RigidState& s, const Vec2& x) const;
  BodyMotion motion_;
  double body_radius_ = 0.0;
  Container box_;
  CutoffSpec margins_;
};

// Node lattice with one ghost ring; node (i, j) sits at lo + (i-1, j-1) h.
struct NodeLattice {
  int nx = 0;  // cell counts of the underlying grid
  int ny = 0;
  double h = 0.0;
  Vec2 lo = Vec2::Zero();

  int dim_x() const { return nx + 3; }
  int dim_y() const { return ny + 3; }
  Vec2 pos(int i, int j) const { return lo + Vec2((i - 1) * h, (j - 1) * h); }
  bool interior(int i, int j) const {
    return i >= 1 && i <= nx + 1 && j >= 1 && j <= ny + 1;
  }
  static NodeLattice from_grid(const Grid& g) { return {g.nx, g.ny, g.h, g.lo}; }
  bool operator==(const NodeLattice& o) const {
    return nx == o.nx && ny == o.ny && h == o.h && (lo - o.lo).norm() == 0.0;
  }
};

struct VecField {
  Field2 x, y;
  VecField() = default;
  VecField(int dim_x, int dim_y) : x(dim_x, dim_y), y(dim_x, dim_y) {}
  Vec2 at(int i, int j) const { return Vec2(x(i, j), y(i, j)); }
  void set(int i, int j, const Vec2& v) {
    x(i, j) = v.x();
    y(i, j) = v.y();
  }
};

// Forward maps sampled on the ghost lattice at a set of stored times.
struct FlowMap {
  NodeLattice lattice;
  std::vector<double> times;
  std::vector<VecField> maps;

  Vec2 sample(int k, const Vec2& p) const;
  int index_of_time(double t, double tol = 1e-9) const;
};

// Integrates dZ/dt = lambda(t, Z) per node with RK4 from identity; stores
// every `store_every` steps plus the final time.
FlowMap integrate_flow(const LambdaProvider& lambda, const Grid& grid, double t_end,
                       double dt, int store_every = 1);

// Newton inversion of a sampled map at one stored time, seeded by `seed`.
Vec2 invert_map_at(const FlowMap& fm, int k, const Vec2& target, Vec2 seed,
                   double tol = 1e-10, int max_iters = 50);

// Inverse maps at every stored time, marching the previous inverse through a
// backward substep and polishing with Newton against the sampled forward map.
FlowMap invert_flow(const FlowMap& fm, const LambdaProvider& lambda);

struct TransformBundle {
  NodeLattice lattice;
  std::vector<double> times;
  std::vector<VecField> z1, z2;      // composite maps
  std::vector<VecField> dtz1, dtz2;  // centered time derivatives
  std::vector<Mat3> tilde_o;         // O2 O1^T
  std::vector<RigidState> body1, body2;

  // construction ingredients, kept for query-level evaluation
  FlowMap flow1, flow2;    // Z_i
  FlowMap inv1, inv2;      // Y_i

  Vec2 sample(const std::vector<VecField>& fields, int k, const Vec2& p) const;
  int index_of_time(double t, double tol = 1e-9) const;

  // Z2(t, Y1(t, x)) and Z1(t, Y2(t, x)) with the inversion done at the query
  // point; composing the two telescopes to the Newton tolerance.
  Vec2 eval_z2(int k, const Vec2& x) const;
  Vec2 eval_z1(int k, const Vec2& y) const;
};

// Builds the composite maps from the two motions on a shared lattice.
TransformBundle build_bundle(const LambdaProvider& lam1, const LambdaProvider& lam2,
                             const Grid& grid, double t_end, double dt,
                             int store_every = 1);

// Pointwise metric data on the ghost lattice interior.
struct MetricField {
  NodeLattice lattice;
  std::vector<Mat3> H, G;
  std::vector<std::array<Mat3, 3>> gamma;  // gamma[i](a, b)

  int idx(int i, int j) const { return j * lattice.dim_x() + i; }
};

MetricField metric_terms(const TransformBundle& b, int k);

// Max |det grad(Z2) - 1| over interior nodes, fourth-order differences.
// The flows of the divergence-free extension preserve area exactly; what
// remains is finite-difference truncation.
double max_det_deviation(const TransformBundle& b, int k);

// U^s(x) = H(x) u2(Z2(x)) and P^s(x) = p2(Z2(x)) on the ghost lattice.
VecField transform_velocity(const std::function<Vec2(const Vec2&)>& u2,
                            const TransformBundle& b, int k, const MetricField& mf);
Field2 transform_pressure(const std::function<double(const Vec2&)>& p2,
                          const TransformBundle& b, int k);

// Assembles the transformed-momentum forcing pointwise on interior nodes.
// The time-derivative factor enters as H dtZ2, the composition-consistent
// form of the inverse-map rate.
VecField forcing(const VecField& us, const Field2& ps, const TransformBundle& b, int k,
                 const MetricField& mf);

struct Lemma31Report {
  double boundary_disp = 0.0;   // max over dB1 of |Z2~ - x|
  double boundary_rate = 0.0;   // max over dB1 of |dt Z2~|
  double w3inf = 0.0;           // FD surrogate of ||Z2~ - id||_{W^{3,inf}}
  double w1inf_rate = 0.0;      // FD surrogate of ||dt Z2~||_{W^{1,inf}}
  double rhs_l2 = 0.0;          // ||V1 - V^s||_{L2(0,t)} + ||w1 - w^s||_{L2(0,t)}
  double rhs_instant = 0.0;     // |V1 - V^s|(t) + |w1 - w^s|(t)
  double rotation_identity_residual = 0.0;
  double ratio_disp = 0.0, ratio_rate = 0.0, ratio_w3 = 0.0, ratio_w1 = 0.0;
};

Lemma31Report verify_lemma31(const TransformBundle& b, int k, const BodyShape& shape1);

// Integrates dO/dt = O W(t) with W = O2^T dO2/dt taken from the stored
// rotations; returns the max Frobenius norm along the way.
double rotation_uniqueness_ode(const std::vector<double>& times,
                               const std::vector<Mat3>& o2_history,
                               const Mat3& o_delta0 = Mat3::Zero());

}  // namespace rigidflow
