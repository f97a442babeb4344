#include "transform.hpp"

#include <cmath>

namespace rigidflow {

BodyMotion::BodyMotion(std::vector<double> times, std::vector<RigidState> states)
    : times_(std::move(times)), states_(std::move(states)) {
  if (times_.size() != states_.size() || times_.size() < 1)
    throw Error(ErrorCode::ConfigInvalid, "body motion needs matching time samples");
  for (size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1]))
      throw Error(ErrorCode::ConfigInvalid, "body motion times must increase");
}

BodyMotion BodyMotion::constant(const RigidState& s, double t_end) {
  return BodyMotion({0.0, t_end}, {s, s});
}

RigidState BodyMotion::at(double t) const {
  if (times_.size() == 1) return states_.front();
  if (t <= times_.front()) return states_.front();
  if (t >= times_.back()) return states_.back();
  size_t hi = 1;
  while (times_[hi] < t) ++hi;
  const size_t lo = hi - 1;
  const double a = (t - times_[lo]) / (times_[hi] - times_[lo]);
  RigidState out;
  out.X = (1 - a) * states_[lo].X + a * states_[hi].X;
  out.V = (1 - a) * states_[lo].V + a * states_[hi].V;
  out.w = (1 - a) * states_[lo].w + a * states_[hi].w;
  out.O = orthonormalize((1 - a) * states_[lo].O + a * states_[hi].O);
  return out;
}

namespace {

// Smooth wall proxy: 4-norm soft min of the four wall distances. Tracks the
// true distance near a single wall and rounds the corner level sets at the
// margin scale, so the cutoff never carries sub-grid structure.
double wall_proxy(const Container& box, const Vec2& x, Vec2* grad) {
  const double d[4] = {x.x() - box.lo.x(), box.hi.x() - x.x(), x.y() - box.lo.y(),
                       box.hi.y() - x.y()};
  static const Vec2 dirs[4] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
  for (int i = 0; i < 4; ++i)
    if (d[i] <= 0.0) {
      if (grad) *grad = dirs[i];
      return d[i];
    }
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double q = 1.0 / (d[i] * d[i]);
    s += q * q;
  }
  const double val = std::pow(s, -0.25);
  if (grad) {
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 4; ++i) g += dirs[i] / std::pow(d[i], 5.0);
    *grad = std::pow(val, 5.0) * g;
  }
  return val;
}

}  // namespace

LambdaProvider::LambdaProvider(BodyMotion motion, double body_radius,
                               const Container& box, const CutoffSpec& margins)
    : motion_(std::move(motion)), body_radius_(body_radius), box_(box),
      margins_(margins) {
  if (!(margins.inner > 0.0) || !(margins.outer > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "cutoff margins must be positive");
  // the inner zone must keep clear of the level set {wall proxy == outer}
  for (const RigidState& s : motion_.states()) {
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * M_PI * k / 64.0;
      const Vec2 x = drop(s.X) +
                     (body_radius_ + margins_.inner) * Vec2(std::cos(th), std::sin(th));
      if (wall_proxy(box_, x, nullptr) <= margins_.outer)
        throw Error(ErrorCode::MarginsOverlap,
                    "cutoff zones intersect near (" + std::to_string(x.x()) + ", " +
                        std::to_string(x.y()) + ")");
    }
  }
}

double LambdaProvider::zeta(double t, const Vec2& x) const {
  const RigidState s = motion_.at(t);
  const double a = (x - drop(s.X)).norm() - body_radius_ - margins_.inner;
  if (a <= 0.0) return 1.0;
  const double b = wall_proxy(box_, x, nullptr) - margins_.outer;
  if (b <= 0.0) return 0.0;
  return smoothstep7(1.0 - a / (a + b));
}

Vec2 LambdaProvider::zeta_gradient(double t, const Vec2& x) const {
  const RigidState s = motion_.at(t);
  const Vec2 r = x - drop(s.X);
  const double a = r.norm() - body_radius_ - margins_.inner;
  if (a <= 0.0) return Vec2::Zero();
  Vec2 grad_b;
  const double b = wall_proxy(box_, x, &grad_b) - margins_.outer;
  if (b <= 0.0) return Vec2::Zero();

  const Vec2 grad_a = r.normalized();
  const double sum = a + b;
  const Vec2 grad_s = (b * grad_a - a * grad_b) / (sum * sum);
  return -smoothstep7_deriv(1.0 - a / sum) * grad_s;
}

double LambdaProvider::stream(const RigidState& s, const Vec2& x) const {
  const Vec2 r = x - drop(s.X);
  return s.V.x() * r.y() - s.V.y() * r.x() - 0.5 * s.w.z() * r.squaredNorm();
}

Vec2 LambdaProvider::rigid_extension(double t, const Vec2& x) const {
  const RigidState s = motion_.at(t);
  return zeta(t, x) * drop(rigid_velocity(s, lift(x)));
}

Vec2 LambdaProvider::velocity(double t, const Vec2& x) const {
  const RigidState s = motion_.at(t);
  const double z = zeta(t, x);
  if (z == 0.0) return Vec2::Zero();
  const Vec2 base = drop(rigid_velocity(s, lift(x)));
  if (z == 1.0) return base;
  const Vec2 gz = zeta_gradient(t, x);
  return z * base + stream(s, x) * perp(-gz);  // psi grad-perp(zeta) with grad-perp f = (f_y, -f_x)
}

Vec2 FlowMap::sample(int k, const Vec2& p) const {
  const Vec2 origin = lattice.pos(0, 0);
  return Vec2(bilinear(maps[k].x, origin, lattice.h, p),
              bilinear(maps[k].y, origin, lattice.h, p));
}

int FlowMap::index_of_time(double t, double tol) const {
  for (size_t k = 0; k < times.size(); ++k)
    if (std::fabs(times[k] - t) <= tol) return static_cast<int>(k);
  throw Error(ErrorCode::ConfigInvalid, "flow map has no sample at t=" + std::to_string(t));
}

namespace {

Vec2 rk4_point(const LambdaProvider& lambda, Vec2 p, double t, double dt) {
  const Vec2 k1 = lambda(t, p);
  const Vec2 k2 = lambda(t + 0.5 * dt, p + 0.5 * dt * k1);
  const Vec2 k3 = lambda(t + 0.5 * dt, p + 0.5 * dt * k2);
  const Vec2 k4 = lambda(t + dt, p + dt * k3);
  return p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VecField identity_field(const NodeLattice& lat) {
  VecField f(lat.dim_x(), lat.dim_y());
  for (int j = 0; j < lat.dim_y(); ++j)
    for (int i = 0; i < lat.dim_x(); ++i) f.set(i, j, lat.pos(i, j));
  return f;
}

}  // namespace

FlowMap integrate_flow(const LambdaProvider& lambda, const Grid& grid, double t_end,
                       double dt, int store_every) {
  const NodeLattice lat = NodeLattice::from_grid(grid);
  FlowMap out;
  out.lattice = lat;
  VecField cur = identity_field(lat);
  out.times.push_back(0.0);
  out.maps.push_back(cur);

  const long n_steps = std::lround(t_end / dt);
  const Vec2 lo = grid.lo - Vec2(2.0 * grid.h, 2.0 * grid.h);
  const Vec2 hi = grid.hi() + Vec2(2.0 * grid.h, 2.0 * grid.h);
  double t = 0.0;
  for (long s = 1; s <= n_steps; ++s) {
    for (int j = 0; j < lat.dim_y(); ++j) {
      for (int i = 0; i < lat.dim_x(); ++i) {
        const Vec2 p = rk4_point(lambda, cur.at(i, j), t, dt);
        if (p.x() < lo.x() || p.x() > hi.x() || p.y() < lo.y() || p.y() > hi.y())
          throw Error(ErrorCode::NodeEscapedDomain,
                      "flow node left the container at t=" + std::to_string(t + dt));
        cur.set(i, j, p);
      }
    }
    t = s * dt;
    if (s % store_every == 0 || s == n_steps) {
      out.times.push_back(t);
      out.maps.push_back(cur);
    }
  }
  return out;
}

Vec2 invert_map_at(const FlowMap& fm, int k, const Vec2& target, Vec2 seed, double tol,
                   int max_iters) {
  const Vec2 origin = fm.lattice.pos(0, 0);
  const double h = fm.lattice.h;
  double res_norm = (fm.sample(k, seed) - target).norm();
  for (int it = 0; it < max_iters; ++it) {
    if (res_norm <= tol) return seed;
    // exact Jacobian of the interpolant on its current patch
    const BilinearSample sx = bilinear_with_grad(fm.maps[k].x, origin, h, seed);
    const BilinearSample sy = bilinear_with_grad(fm.maps[k].y, origin, h, seed);
    const Vec2 res(sx.value - target.x(), sy.value - target.y());
    const double det = sx.ddx * sy.ddy - sx.ddy * sy.ddx;
    if (std::fabs(det) < 1e-12)
      throw Error(ErrorCode::SingularJacobian, "inverse map Jacobian is singular");
    const Vec2 step(( sy.ddy * res.x() - sx.ddy * res.y()) / det,
                    (-sy.ddx * res.x() + sx.ddx * res.y()) / det);
    // backtrack across patch boundaries until the residual drops
    double damping = 1.0;
    Vec2 next = seed - step;
    double next_norm = (fm.sample(k, next) - target).norm();
    for (int bt = 0; bt < 30 && next_norm >= res_norm; ++bt) {
      damping *= 0.5;
      next = seed - damping * step;
      next_norm = (fm.sample(k, next) - target).norm();
    }
    if (next_norm >= res_norm) break;
    seed = next;
    res_norm = next_norm;
  }
  if (res_norm <= tol) return seed;
  throw Error(ErrorCode::NewtonStalled,
              "map inversion stalled after " + std::to_string(max_iters) +
                  " iterations (residual " + std::to_string(res_norm) + ")");
}

namespace {

// Full backward integration from t down to 0; the most robust Newton seed.
Vec2 backward_seed(const LambdaProvider& lambda, const Vec2& x, double t) {
  const int sub = std::max(8, static_cast<int>(std::ceil(t / 0.005)));
  const double dt = -t / sub;
  Vec2 p = x;
  for (int s = 0; s < sub; ++s) p = rk4_point(lambda, p, t + s * dt, dt);
  return p;
}

Vec2 invert_with_fallback(const FlowMap& fm, int k, const Vec2& target,
                          const Vec2& seed, const LambdaProvider& lambda) {
  try {
    return invert_map_at(fm, k, target, seed, 1e-11, 200);
  } catch (const Error&) {
    return invert_map_at(fm, k, target, backward_seed(lambda, target, fm.times[k]),
                         1e-11, 400);
  }
}

}  // namespace

FlowMap invert_flow(const FlowMap& fm, const LambdaProvider& lambda) {
  const NodeLattice& lat = fm.lattice;
  FlowMap out;
  out.lattice = lat;
  out.times = fm.times;
  out.maps.resize(fm.maps.size());
  out.maps[0] = identity_field(lat);

  for (size_t k = 1; k < fm.times.size(); ++k) {
    const double t1 = fm.times[k];
    const double t0 = fm.times[k - 1];
    const int sub = 4;
    const double dt = (t0 - t1) / sub;  // backward
    VecField inv(lat.dim_x(), lat.dim_y());
    for (int j = 0; j < lat.dim_y(); ++j) {
      for (int i = 0; i < lat.dim_x(); ++i) {
        Vec2 p = lat.pos(i, j);
        for (int s = 0; s < sub; ++s) p = rk4_point(lambda, p, t1 + s * dt, dt);
        Vec2 seed(bilinear(out.maps[k - 1].x, lat.pos(0, 0), lat.h, p),
                  bilinear(out.maps[k - 1].y, lat.pos(0, 0), lat.h, p));
        inv.set(i, j,
                invert_with_fallback(fm, static_cast<int>(k), lat.pos(i, j), seed,
                                     lambda));
      }
    }
    out.maps[k] = std::move(inv);
  }
  return out;
}

Vec2 TransformBundle::sample(const std::vector<VecField>& fields, int k,
                             const Vec2& p) const {
  const Vec2 origin = lattice.pos(0, 0);
  return Vec2(bilinear(fields[k].x, origin, lattice.h, p),
              bilinear(fields[k].y, origin, lattice.h, p));
}

int TransformBundle::index_of_time(double t, double tol) const {
  for (size_t k = 0; k < times.size(); ++k)
    if (std::fabs(times[k] - t) <= tol) return static_cast<int>(k);
  throw Error(ErrorCode::ConfigInvalid,
              "bundle has no sample at t=" + std::to_string(t));
}

Vec2 TransformBundle::eval_z2(int k, const Vec2& x) const {
  Vec2 seed(bilinear(inv1.maps[k].x, lattice.pos(0, 0), lattice.h, x),
            bilinear(inv1.maps[k].y, lattice.pos(0, 0), lattice.h, x));
  const Vec2 y = invert_map_at(flow1, k, x, seed, 1e-11, 200);
  return flow2.sample(k, y);
}

Vec2 TransformBundle::eval_z1(int k, const Vec2& y) const {
  Vec2 seed(bilinear(inv2.maps[k].x, lattice.pos(0, 0), lattice.h, y),
            bilinear(inv2.maps[k].y, lattice.pos(0, 0), lattice.h, y));
  const Vec2 w = invert_map_at(flow2, k, y, seed, 1e-11, 200);
  return flow1.sample(k, w);
}

TransformBundle build_bundle(const LambdaProvider& lam1, const LambdaProvider& lam2,
                             const Grid& grid, double t_end, double dt,
                             int store_every) {
  const FlowMap z1 = integrate_flow(lam1, grid, t_end, dt, store_every);
  const FlowMap z2 = integrate_flow(lam2, grid, t_end, dt, store_every);
  const FlowMap y1 = invert_flow(z1, lam1);
  const FlowMap y2 = invert_flow(z2, lam2);

  const NodeLattice& lat = z1.lattice;
  TransformBundle b;
  b.lattice = lat;
  b.times = z1.times;
  const size_t nt = b.times.size();
  b.z1.resize(nt);
  b.z2.resize(nt);
  for (size_t k = 0; k < nt; ++k) {
    VecField tz1(lat.dim_x(), lat.dim_y());
    VecField tz2(lat.dim_x(), lat.dim_y());
    for (int j = 0; j < lat.dim_y(); ++j) {
      for (int i = 0; i < lat.dim_x(); ++i) {
        tz1.set(i, j, z1.sample(static_cast<int>(k), y2.maps[k].at(i, j)));
        tz2.set(i, j, z2.sample(static_cast<int>(k), y1.maps[k].at(i, j)));
      }
    }
    b.z1[k] = std::move(tz1);
    b.z2[k] = std::move(tz2);
    const RigidState s1 = lam1.motion().at(b.times[k]);
    const RigidState s2 = lam2.motion().at(b.times[k]);
    b.body1.push_back(s1);
    b.body2.push_back(s2);
    b.tilde_o.push_back(s2.O * s1.O.transpose());
  }

  // centered time derivatives of the stored maps
  auto time_derivative = [&](const std::vector<VecField>& f) {
    std::vector<VecField> d(nt);
    for (size_t k = 0; k < nt; ++k) {
      const size_t ka = k == 0 ? 0 : k - 1;
      const size_t kb = k + 1 == nt ? k : k + 1;
      const double span = b.times[kb] - b.times[ka];
      VecField g(lat.dim_x(), lat.dim_y());
      for (int j = 0; j < lat.dim_y(); ++j)
        for (int i = 0; i < lat.dim_x(); ++i)
          g.set(i, j, (f[kb].at(i, j) - f[ka].at(i, j)) / span);
      d[k] = std::move(g);
    }
    return d;
  };
  if (nt > 1) {
    b.dtz1 = time_derivative(b.z1);
    b.dtz2 = time_derivative(b.z2);
  } else {
    b.dtz1.assign(1, VecField(lat.dim_x(), lat.dim_y()));
    b.dtz2.assign(1, VecField(lat.dim_x(), lat.dim_y()));
  }
  b.flow1 = z1;
  b.flow2 = z2;
  b.inv1 = y1;
  b.inv2 = y2;
  return b;
}

MetricField metric_terms(const TransformBundle& b, int k) {
  const NodeLattice& lat = b.lattice;
  MetricField mf;
  mf.lattice = lat;
  const int dx = lat.dim_x(), dy = lat.dim_y();
  mf.H.assign(static_cast<size_t>(dx) * dy, Mat3::Identity());
  mf.G.assign(static_cast<size_t>(dx) * dy, Mat3::Identity());
  std::array<Mat3, 3> zero_gamma = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  mf.gamma.assign(static_cast<size_t>(dx) * dy, zero_gamma);

  const VecField& z2 = b.z2[k];
  const double inv2h = 1.0 / (2.0 * lat.h);
  const double invh2 = 1.0 / (lat.h * lat.h);

  for (int j = 1; j < dy - 1; ++j) {
    for (int i = 1; i < dx - 1; ++i) {
      Mat3 a = Mat3::Identity();
      a(0, 0) = (z2.x(i + 1, j) - z2.x(i - 1, j)) * inv2h;
      a(0, 1) = (z2.x(i, j + 1) - z2.x(i, j - 1)) * inv2h;
      a(1, 0) = (z2.y(i + 1, j) - z2.y(i - 1, j)) * inv2h;
      a(1, 1) = (z2.y(i, j + 1) - z2.y(i, j - 1)) * inv2h;
      const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      if (std::fabs(det) < 1e-8)
        throw Error(ErrorCode::SingularJacobian,
                    "transform Jacobian determinant " + std::to_string(det));
      Mat3 h = Mat3::Identity();
      h(0, 0) = a(1, 1) / det;
      h(0, 1) = -a(0, 1) / det;
      h(1, 0) = -a(1, 0) / det;
      h(1, 1) = a(0, 0) / det;
      const int id = mf.idx(i, j);
      mf.H[id] = h;
      mf.G[id] = h * h.transpose();

      // second derivatives of the two planar components
      double sxx[2], syy[2], sxy[2];
      const Field2* comp[2] = {&z2.x, &z2.y};
      for (int c = 0; c < 2; ++c) {
        const Field2& f = *comp[c];
        sxx[c] = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * invh2;
        syy[c] = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * invh2;
        sxy[c] = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) +
                  f(i - 1, j - 1)) * 0.25 * invh2;
      }
      for (int ci = 0; ci < 3; ++ci) {
        Mat3 g = Mat3::Zero();
        for (int l = 0; l < 2; ++l) {
          g(0, 0) += h(ci, l) * sxx[l];
          g(1, 1) += h(ci, l) * syy[l];
          g(0, 1) += h(ci, l) * sxy[l];
        }
        g(1, 0) = g(0, 1);
        mf.gamma[id][ci] = g;
      }
    }
  }
  return mf;
}

double max_det_deviation(const TransformBundle& b, int k) {
  const NodeLattice& lat = b.lattice;
  const VecField& f = b.z2[k];
  const double c = 1.0 / (12.0 * lat.h);
  auto dx4 = [&](const Field2& g, int i, int j) {
    return (g(i - 2, j) - 8.0 * g(i - 1, j) + 8.0 * g(i + 1, j) - g(i + 2, j)) * c;
  };
  auto dy4 = [&](const Field2& g, int i, int j) {
    return (g(i, j - 2) - 8.0 * g(i, j - 1) + 8.0 * g(i, j + 1) - g(i, j + 2)) * c;
  };
  double worst = 0.0;
  for (int j = 2; j < lat.dim_y() - 2; ++j) {
    for (int i = 2; i < lat.dim_x() - 2; ++i) {
      const double a00 = dx4(f.x, i, j);
      const double a01 = dy4(f.x, i, j);
      const double a10 = dx4(f.y, i, j);
      const double a11 = dy4(f.y, i, j);
      worst = std::max(worst, std::fabs(a00 * a11 - a01 * a10 - 1.0));
    }
  }
  return worst;
}

VecField transform_velocity(const std::function<Vec2(const Vec2&)>& u2,
                            const TransformBundle& b, int k, const MetricField& mf) {
  const NodeLattice& lat = b.lattice;
  VecField us(lat.dim_x(), lat.dim_y());
  for (int j = 0; j < lat.dim_y(); ++j) {
    for (int i = 0; i < lat.dim_x(); ++i) {
      const Vec2 y = b.z2[k].at(i, j);
      const Vec2 u = u2(y);
      const int ii = std::clamp(i, 1, lat.dim_x() - 2);
      const int jj = std::clamp(j, 1, lat.dim_y() - 2);
      const Mat3& h = mf.H[mf.idx(ii, jj)];
      const Vec3 mapped = h * lift(u);
      us.set(i, j, drop(mapped));
    }
  }
  return us;
}

Field2 transform_pressure(const std::function<double(const Vec2&)>& p2,
                          const TransformBundle& b, int k) {
  const NodeLattice& lat = b.lattice;
  Field2 ps(lat.dim_x(), lat.dim_y());
  for (int j = 0; j < lat.dim_y(); ++j)
    for (int i = 0; i < lat.dim_x(); ++i) ps(i, j) = p2(b.z2[k].at(i, j));
  return ps;
}

VecField forcing(const VecField& us, const Field2& ps, const TransformBundle& b, int k,
                 const MetricField& mf) {
  const NodeLattice& lat = b.lattice;
  VecField f(lat.dim_x(), lat.dim_y());
  const double inv2h = 1.0 / (2.0 * lat.h);

  for (int j = 1; j < lat.dim_y() - 1; ++j) {
    for (int i = 1; i < lat.dim_x() - 1; ++i) {
      const int id = mf.idx(i, j);
      const Mat3& h = mf.H[id];
      const Mat3& g = mf.G[id];
      const auto& gam = mf.gamma[id];

      const Vec3 u = lift(us.at(i, j));
      const Vec3 q = lift(b.dtz2[k].at(i, j));
      const Vec3 v = h * q;  // composition-consistent map rate

      // spatial derivatives of dtz2, us, ps on the lattice
      Mat3 grad_dtz2 = Mat3::Zero();  // (a, b) = d_b (dtz2)_a
      grad_dtz2(0, 0) = (b.dtz2[k].x(i + 1, j) - b.dtz2[k].x(i - 1, j)) * inv2h;
      grad_dtz2(0, 1) = (b.dtz2[k].x(i, j + 1) - b.dtz2[k].x(i, j - 1)) * inv2h;
      grad_dtz2(1, 0) = (b.dtz2[k].y(i + 1, j) - b.dtz2[k].y(i - 1, j)) * inv2h;
      grad_dtz2(1, 1) = (b.dtz2[k].y(i, j + 1) - b.dtz2[k].y(i, j - 1)) * inv2h;

      Mat3 grad_us = Mat3::Zero();  // (a, b) = d_b (us)_a
      grad_us(0, 0) = (us.x(i + 1, j) - us.x(i - 1, j)) * inv2h;
      grad_us(0, 1) = (us.x(i, j + 1) - us.x(i, j - 1)) * inv2h;
      grad_us(1, 0) = (us.y(i + 1, j) - us.y(i - 1, j)) * inv2h;
      grad_us(1, 1) = (us.y(i, j + 1) - us.y(i, j - 1)) * inv2h;

      Vec3 grad_ps = Vec3::Zero();
      grad_ps.x() = (ps(i + 1, j) - ps(i - 1, j)) * inv2h;
      grad_ps.y() = (ps(i, j + 1) - ps(i, j - 1)) * inv2h;

      Vec3 out = Vec3::Zero();
      // -H_{ia} dt d_b (Z2)_a u_b
      out -= h * (grad_dtz2 * u);
      // + Gamma^i(v, u) + (v . grad) u
      for (int ci = 0; ci < 3; ++ci) out[ci] += v.dot(gam[ci] * u);
      out += grad_us * v;
      // - Gamma^i(u, u)
      for (int ci = 0; ci < 3; ++ci) out[ci] -= u.dot(gam[ci] * u);
      // - (G - I) grad ps
      out -= (g - Mat3::Identity()) * grad_ps;

      f.set(i, j, drop(out));
    }
  }
  return f;
}

Lemma31Report verify_lemma31(const TransformBundle& b, int k, const BodyShape& shape1) {
  const NodeLattice& lat = b.lattice;
  Lemma31Report rep;
  const RigidState& s1 = b.body1[k];
  const RigidState& s2 = b.body2[k];
  const Mat3& ot = b.tilde_o[k];
  const Vec3 vs = ot.transpose() * s2.V;
  const Vec3 ws = ot.transpose() * s2.w;

  for (const auto& bs : shape1.boundary_samples(256)) {
    const Vec3 world = s1.placement().apply(lift(bs.point));
    const Vec2 x = drop(world);
    rep.boundary_disp = std::max(rep.boundary_disp, (b.sample(b.z2, k, x) - x).norm());
    rep.boundary_rate = std::max(rep.boundary_rate, b.sample(b.dtz2, k, x).norm());
  }

  // finite-difference Sobolev surrogates over interior nodes
  const double inv2h = 1.0 / (2.0 * lat.h);
  for (int j = 2; j < lat.dim_y() - 2; ++j) {
    for (int i = 2; i < lat.dim_x() - 2; ++i) {
      const Vec2 p = lat.pos(i, j);
      const Vec2 dis = b.z2[k].at(i, j) - p;
      double local = dis.norm();
      const Field2* comp[2] = {&b.z2[k].x, &b.z2[k].y};
      for (int c = 0; c < 2; ++c) {
        const Field2& f = *comp[c];
        const double fx = (f(i + 1, j) - f(i - 1, j)) * inv2h - (c == 0 ? 1.0 : 0.0);
        const double fy = (f(i, j + 1) - f(i, j - 1)) * inv2h - (c == 1 ? 1.0 : 0.0);
        const double fxx = (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) / (lat.h * lat.h);
        const double fyy = (f(i, j + 1) - 2 * f(i, j) + f(i, j - 1)) / (lat.h * lat.h);
        const double fxy = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) +
                            f(i - 1, j - 1)) * 0.25 / (lat.h * lat.h);
        const double fxxx = (f(i + 2, j) - 2 * f(i + 1, j) + 2 * f(i - 1, j) -
                             f(i - 2, j)) / (2 * lat.h * lat.h * lat.h);
        const double fyyy = (f(i, j + 2) - 2 * f(i, j + 1) + 2 * f(i, j - 1) -
                             f(i, j - 2)) / (2 * lat.h * lat.h * lat.h);
        for (double v : {fx, fy, fxx, fyy, fxy, fxxx, fyyy})
          local = std::max(local, std::fabs(v));
      }
      rep.w3inf = std::max(rep.w3inf, local);

      double rate = b.dtz2[k].at(i, j).norm();
      const Field2* dcomp[2] = {&b.dtz2[k].x, &b.dtz2[k].y};
      for (int c = 0; c < 2; ++c) {
        const Field2& f = *dcomp[c];
        rate = std::max(rate, std::fabs((f(i + 1, j) - f(i - 1, j)) * inv2h));
        rate = std::max(rate, std::fabs((f(i, j + 1) - f(i, j - 1)) * inv2h));
      }
      rep.w1inf_rate = std::max(rep.w1inf_rate, rate);
    }
  }

  // L2-in-time and instantaneous velocity differences
  double acc = 0.0;
  for (int m = 1; m <= k; ++m) {
    const double dt = b.times[m] - b.times[m - 1];
    auto gap = [&](int idx) {
      const Mat3& o = b.tilde_o[idx];
      const Vec3 dv = b.body1[idx].V - o.transpose() * b.body2[idx].V;
      const Vec3 dw = b.body1[idx].w - o.transpose() * b.body2[idx].w;
      return dv.squaredNorm() + dw.squaredNorm();
    };
    acc += 0.5 * dt * (gap(m - 1) + gap(m));
  }
  rep.rhs_l2 = std::sqrt(acc);
  rep.rhs_instant = (s1.V - vs).norm() + (s1.w - ws).norm();

  // rotation identity O~^T dO~/dt x = (w^s - w1) x x
  if (b.times.size() > 1) {
    const size_t ka = k == 0 ? 0 : k - 1;
    const size_t kb = static_cast<size_t>(k) + 1 == b.times.size() ? k : k + 1;
    const Mat3 dot = (b.tilde_o[kb] - b.tilde_o[ka]) / (b.times[kb] - b.times[ka]);
    const Mat3 a = ot.transpose() * dot;
    const Vec3 vee(a(2, 1), a(0, 2), a(1, 0));
    rep.rotation_identity_residual = (vee - (ws - s1.w)).norm() +
        0.5 * (a + a.transpose()).norm();
  }

  auto ratio = [](double lhs, double rhs) { return rhs > 1e-14 ? lhs / rhs : 0.0; };
  rep.ratio_disp = ratio(rep.boundary_disp, rep.rhs_l2);
  rep.ratio_rate = ratio(rep.boundary_rate, rep.rhs_instant);
  rep.ratio_w3 = ratio(rep.w3inf, rep.rhs_l2);
  rep.ratio_w1 = ratio(rep.w1inf_rate, rep.rhs_instant);
  return rep;
}

double rotation_uniqueness_ode(const std::vector<double>& times,
                               const std::vector<Mat3>& o2_history,
                               const Mat3& o_delta0) {
  if (times.size() != o2_history.size() || times.size() < 2)
    throw Error(ErrorCode::ConfigInvalid, "rotation history needs matched samples");

  // W(t) = O2^T dO2/dt from centered differences, linear in between
  const size_t n = times.size();
  std::vector<Mat3> w(n);
  for (size_t k = 0; k < n; ++k) {
    const size_t ka = k == 0 ? 0 : k - 1;
    const size_t kb = k + 1 == n ? k : k + 1;
    const Mat3 dot = (o2_history[kb] - o2_history[ka]) / (times[kb] - times[ka]);
    w[k] = o2_history[k].transpose() * dot;
  }
  auto w_at = [&](double t) {
    if (t <= times.front()) return w.front();
    if (t >= times.back()) return w.back();
    size_t hi = 1;
    while (times[hi] < t) ++hi;
    const double a = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    return Mat3(((1 - a) * w[hi - 1] + a * w[hi]));
  };

  Mat3 od = o_delta0;
  double worst = od.norm();
  for (size_t k = 1; k < n; ++k) {
    const double dt = times[k] - times[k - 1];
    const double t = times[k - 1];
    const Mat3 k1 = od * w_at(t);
    const Mat3 k2 = (od + 0.5 * dt * k1) * w_at(t + 0.5 * dt);
    const Mat3 k3 = (od + 0.5 * dt * k2) * w_at(t + 0.5 * dt);
    const Mat3 k4 = (od + dt * k3) * w_at(t + dt);
    od += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    worst = std::max(worst, od.norm());
  }
  return worst;
}

}  // namespace rigidflow
