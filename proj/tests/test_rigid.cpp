#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rigid.hpp"

using namespace rigidflow;

namespace {

// World-frame inertia of a placed constant-density polygon, exact in x per
// scan row and midpoint in y. Independent of the O J O^T shortcut.
Mat3 inertia_world_rows(const BodyShape& shape, const Placement& p, int rows) {
  std::vector<Vec2> w;
  for (const Vec2& v : shape.vertices()) {
    const Vec3 q = p.apply(lift(v));
    w.emplace_back(q.x(), q.y());
  }
  double ylo = w[0].y(), yhi = w[0].y();
  for (const Vec2& q : w) {
    ylo = std::min(ylo, q.y());
    yhi = std::max(yhi, q.y());
  }
  const double hy = (yhi - ylo) / rows;
  double mass = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (int r = 0; r < rows; ++r) {
    const double y = ylo + (r + 0.5) * hy;
    std::vector<double> xs;
    for (size_t i = 0; i < w.size(); ++i) {
      const Vec2 a = w[i], b = w[(i + 1) % w.size()];
      if ((a.y() > y) == (b.y() > y)) continue;
      xs.push_back(a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double xa = xs[k], xb = xs[k + 1];
      const double len = xb - xa;
      const double ix = 0.5 * (xb * xb - xa * xa);
      const double ixx = (xb * xb * xb - xa * xa * xa) / 3.0;
      const double yr = y - p.X.y();
      mass += len;
      first += Vec3(ix - len * p.X.x(), yr * len, 0.0);
      second(0, 0) += ixx - 2.0 * p.X.x() * ix + p.X.x() * p.X.x() * len;
      second(1, 1) += yr * yr * len;
      second(0, 1) += yr * (ix - len * p.X.x());
    }
  }
  mass *= hy;
  first *= hy;
  second *= hy;
  second(1, 0) = second(0, 1);
  const Vec3 c = first / mass;
  const Mat3 centered = second - mass * c * c.transpose();
  return centered.trace() * Mat3::Identity() - centered;
}

RigidState random_state() {
  RigidState s;
  s.X = oracles::random_vec3(1.0);
  s.O = oracles::expm(oracles::skew(oracles::random_vec3(1.0)));
  s.V = oracles::random_vec3(1.0);
  s.w = oracles::random_vec3(1.5);
  return s;
}

}  // namespace

TEST_CASE("mass properties of the unit disk") {
  const auto mp = mass_properties(BodyShape::disk(1.0));
  CHECK(mp.m == doctest::Approx(M_PI).epsilon(1e-5));
  CHECK(mp.X0.norm() < 1e-6);
  CHECK(mp.J_body(2, 2) == doctest::Approx(M_PI / 2.0).epsilon(1e-5));
  CHECK(mp.J_body(0, 0) == doctest::Approx(M_PI / 4.0).epsilon(1e-5));
  CHECK(mp.J_body(1, 1) == doctest::Approx(M_PI / 4.0).epsilon(1e-5));
  CHECK(std::fabs(mp.J_body(0, 1)) < 1e-7);
}

TEST_CASE("mass properties of the unit ball") {
  const auto mp = mass_properties(BodyShape::ball(1.0));
  CHECK(mp.m == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-4));
  const double jref = 8.0 * M_PI / 15.0;
  for (int i = 0; i < 3; ++i) CHECK(mp.J_body(i, i) == doctest::Approx(jref).epsilon(1e-4));
  CHECK((mp.J_body - jref * Mat3::Identity()).norm() / jref < 1e-4);
}

TEST_CASE("mass properties are linear in density") {
  const std::vector<Vec2> tri = {{0, 0}, {2, 0.3}, {0.4, 1.7}};
  Density d1{1.0, Vec2(0.2, -0.1)};
  Density d2{2.0, Vec2(0.4, -0.2)};
  const auto a = mass_properties(BodyShape::polygon(tri, d1));
  const auto b = mass_properties(BodyShape::polygon(tri, d2));
  CHECK(b.m == doctest::Approx(2.0 * a.m).epsilon(1e-10));
  CHECK((b.J_body - 2.0 * a.J_body).norm() / a.J_body.norm() < 1e-9);
  CHECK((b.X0 - a.X0).norm() < 1e-9);
}

TEST_CASE("quadrature convergence guard") {
  // deliberately coarse resolution on a thin sliver shape
  const BodyShape sliver = BodyShape::polygon({{0, 0}, {3.0, 0.008}, {3.0, 0.0}});
  CHECK_THROWS_AS(mass_properties(sliver, 64), Error);
}

TEST_CASE("rigid velocity field") {
  RigidState s;
  s.V = Vec3(0.3, -0.2, 0);
  CHECK((rigid_velocity(s, Vec3(5, 5, 0)) - s.V).norm() == 0.0);

  s.V = Vec3::Zero();
  s.w = Vec3(0, 0, 1);
  CHECK((rigid_velocity(s, Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-15);

  for (int k = 0; k < 30; ++k) {
    const RigidState r = random_state();
    const Vec3 x = oracles::random_vec3(3.0);
    const Vec3 rel = x - r.X;
    const Vec3 expect(r.V.x() + r.w.y() * rel.z() - r.w.z() * rel.y(),
                      r.V.y() + r.w.z() * rel.x() - r.w.x() * rel.z(),
                      r.V.z() + r.w.x() * rel.y() - r.w.y() * rel.x());
    CHECK((rigid_velocity(r, x) - expect).norm() < 1e-14);
  }
}

TEST_CASE("current-frame inertia") {
  const auto mp = mass_properties(BodyShape::disk(1.0));
  CHECK((inertia_current(mp, Mat3::Identity()) - mp.J_body).norm() < 1e-15);

  const auto ball = mass_properties(BodyShape::ball(0.7));
  const Mat3 o = oracles::expm(oracles::skew(Vec3(0.4, -1.1, 0.3)));
  CHECK((inertia_current(ball, o) - ball.J_body).norm() / ball.J_body.norm() < 1e-10);
}

TEST_CASE("rotated plate inertia matches world-frame quadrature") {
  const BodyShape plate = BodyShape::polygon({{-1, -0.5}, {1, -0.5}, {1, 0.5}, {-1, 0.5}});
  const auto mp = mass_properties(plate);
  Placement p;
  p.X = Vec3(0.2, -0.1, 0);
  p.O = oracles::rotation_about_z(M_PI / 4.0);
  const Mat3 direct = inertia_world_rows(plate, p, 20000);
  const Mat3 via_O = inertia_current(mp, p.O);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(via_O(i, j) == doctest::Approx(direct(i, j)).epsilon(1e-6));
  CHECK(via_O(2, 2) == doctest::Approx(direct(2, 2)).epsilon(1e-6));
}

TEST_CASE("free translation is exact") {
  const auto mp = mass_properties(BodyShape::disk(1.0));
  RigidState s;
  s.V = Vec3(0.5, -0.25, 0);
  RigidState r = s;
  for (int k = 0; k < 100; ++k) r = step_rigid(r, mp, Vec3::Zero(), Vec3::Zero(), 0.01);
  CHECK((r.V - s.V).norm() < 1e-14);
  CHECK((r.X - Vec3(0.5, -0.25, 0)).norm() < 1e-12);
  CHECK((r.O - Mat3::Identity()).norm() < 1e-14);
}

TEST_CASE("spherical spin follows the matrix exponential") {
  const auto mp = mass_properties(BodyShape::ball(1.0));
  RigidState s;
  s.w = Vec3(0.3, 1.1, -0.7);
  RigidState r = s;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) r = step_rigid(r, mp, Vec3::Zero(), Vec3::Zero(), dt);
  const Mat3 expect = oracles::expm(oracles::skew(s.w));  // t = 1
  CHECK((r.O - expect).norm() < 1e-8);
  CHECK((r.w - s.w).norm() < 1e-10);
}

TEST_CASE("torque-free asymmetric top conserves energy and momentum norm") {
  MassProperties mp;
  mp.m = 1.0;
  mp.J_body = Vec3(1.0, 2.0, 3.0).asDiagonal();
  RigidState s;
  s.w = Vec3(0.9, -1.2, 0.6);
  const Mat3 j0 = inertia_current(mp, s.O);
  const double e0 = 0.5 * s.w.dot(j0 * s.w);
  const double l0 = (j0 * s.w).norm();

  RigidState r = s;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    r = step_rigid(r, mp, Vec3::Zero(), Vec3::Zero(), dt);
    CHECK((r.O.transpose() * r.O - Mat3::Identity()).norm() <= 1e-10);
    CHECK(r.O.determinant() > 0.0);
  }
  const Mat3 j1 = inertia_current(mp, r.O);
  CHECK(0.5 * r.w.dot(j1 * r.w) == doctest::Approx(e0).epsilon(1e-6));
  CHECK((j1 * r.w).norm() == doctest::Approx(l0).epsilon(1e-6));

  // fine-step reference over the same horizon
  using S12 = oracles::StateVec<12>;
  auto rhs = [&](double, const S12& y) {
    Eigen::Map<const Mat3> O(y.data());
    const Vec3 w(y[9], y[10], y[11]);
    const Mat3 J = O * mp.J_body * O.transpose();
    const Vec3 dw = J.ldlt().solve((J * w).cross(w));
    const Mat3 dO = oracles::skew(w) * O;
    S12 dy;
    Eigen::Map<Mat3>(dy.data()) = dO;
    dy[9] = dw.x();
    dy[10] = dw.y();
    dy[11] = dw.z();
    return dy;
  };
  S12 y0;
  Eigen::Map<Mat3>(y0.data()) = s.O;
  y0[9] = s.w.x();
  y0[10] = s.w.y();
  y0[11] = s.w.z();
  const S12 yref = oracles::rk4<12>(rhs, y0, 0.0, 1.0, 20000);
  CHECK((r.w - Vec3(yref[9], yref[10], yref[11])).norm() < 1e-7);
  CHECK((r.O - Eigen::Map<const Mat3>(yref.data())).norm() < 1e-7);
}

TEST_CASE("transformed body step") {
  const Mat3 J1 = 1.7 * Mat3::Identity();

  SUBCASE("identical motions stay constant") {
    Vec3 Vs(0.4, -0.2, 0.0), ws(0.0, 0.0, 0.8);
    const Vec3 w1 = ws;
    const Vec3 v0 = Vs, w0 = ws;
    for (int k = 0; k < 200; ++k)
      step_transformed_rigid(Vs, ws, w1, J1, 2.0, Vec3::Zero(), Vec3::Zero(), 0.01);
    CHECK((Vs - v0).norm() < 1e-13);
    CHECK((ws - w0).norm() < 1e-13);
  }

  SUBCASE("reduces to the plain body step when both spins vanish") {
    const auto mp = mass_properties(BodyShape::disk(1.0));
    Vec3 Vs(0.1, 0.2, 0.0), ws = Vec3::Zero();
    const Vec3 force(0.3, -0.1, 0.0);
    step_transformed_rigid(Vs, ws, Vec3::Zero(), mp.J_body, mp.m, force, Vec3::Zero(),
                           0.01);
    RigidState s;
    s.V = Vec3(0.1, 0.2, 0.0);
    const RigidState r = step_rigid(s, mp, force, Vec3::Zero(), 0.01);
    CHECK((Vs - r.V).norm() < 1e-13);
    CHECK(ws.norm() < 1e-13);
  }

  SUBCASE("matches a fine-step reference on random data") {
    Mat3 Jr = Vec3(1.0, 2.0, 3.0).asDiagonal();
    const Vec3 w1 = oracles::random_vec3(1.0);
    const Vec3 pf = oracles::random_vec3(0.5);
    const Vec3 pt = oracles::random_vec3(0.5);
    const double m = 2.3;
    Vec3 Vs = oracles::random_vec3(1.0);
    Vec3 ws = oracles::random_vec3(1.0);
    const Vec3 vs0 = Vs, ws0 = ws;

    const double t1 = 0.5;
    const int coarse_steps = 50;
    Vec3 v = vs0, w = ws0;
    for (int k = 0; k < coarse_steps; ++k)
      step_transformed_rigid(v, w, w1, Jr, m, pf, pt, t1 / coarse_steps);

    using S6 = oracles::StateVec<6>;
    auto rhs = [&](double, const S6& y) {
      const Vec3 V(y[0], y[1], y[2]), W(y[3], y[4], y[5]);
      const Vec3 dV = -(W - w1).cross(V) + pf / m;
      const Vec3 dW = Jr.ldlt().solve((Jr * W).cross(W) - (W - w1).cross(Jr * W) + pt);
      S6 dy;
      dy << dV, dW;
      return dy;
    };
    S6 y0;
    y0 << vs0, ws0;
    const S6 yref = oracles::rk4<6>(rhs, y0, 0.0, t1, 20000);
    CHECK((v - Vec3(yref[0], yref[1], yref[2])).norm() < 1e-7);
    CHECK((w - Vec3(yref[3], yref[4], yref[5])).norm() < 1e-7);
  }
}

TEST_CASE("body kinetic energy formula agrees with quadrature") {
  const BodyShape disk = BodyShape::disk(1.0);
  const auto mp = mass_properties(disk);

  RigidState s;
  s.V = Vec3(1.0, 0.0, 0.0);
  CHECK(body_kinetic_energy(mp, s) == doctest::Approx(M_PI / 2.0).epsilon(1e-6));

  s.V = Vec3::Zero();
  s.w = Vec3(0, 0, 1.0);
  CHECK(body_kinetic_energy(mp, s) == doctest::Approx(M_PI / 4.0).epsilon(1e-6));

  s.X = Vec3(0.4, -0.3, 0.0);
  s.V = Vec3(0.7, 0.2, 0.0);
  s.w = Vec3(0, 0, -1.3);
  s.O = oracles::rotation_about_z(0.9);
  const double direct = body_kinetic_energy_quadrature(disk, s, 3000);
  CHECK(body_kinetic_energy(mp, s) == doctest::Approx(direct).epsilon(1e-6));

  // coercivity with c = min(m, lambda_min(J)) / 2
  const double c =
      0.5 * std::min(mp.m, mp.J_body.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff());
  CHECK(body_kinetic_energy(mp, s) >= c * (s.V.squaredNorm() + s.w.squaredNorm()));
}

TEST_CASE("free rigid motion preserves the transported volume") {
  const BodyShape tri = BodyShape::polygon({{0, 0}, {1.4, 0.2}, {0.3, 1.1}});
  const auto mp = mass_properties(tri);
  RigidState s;
  s.V = Vec3(0.21, -0.13, 0);
  s.w = Vec3(0, 0, 0.9);

  auto volume = [&](const RigidState& st) {
    const int n = 1200;
    const double R = 3.0, h = 2 * R / n, sm = 3.0 * h;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 y(-R + (i + 0.5) * h, -R + (j + 0.5) * h, 0.0);
        acc += indicator(tri, st.placement(), y, sm);
      }
    return acc * h * h;
  };

  const double v0 = volume(s);
  RigidState r = s;
  for (int k = 0; k < 60; ++k) r = step_rigid(r, mp, Vec3::Zero(), Vec3::Zero(), 0.01);
  const double v1 = volume(r);
  CHECK(v1 == doctest::Approx(v0).epsilon(1e-6));
}
