#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geometry.hpp"
#include "oracles.hpp"

using namespace rigidflow;

namespace {

Placement rot_z(double angle, const Vec3& X = Vec3::Zero()) {
  Placement p;
  p.X = X;
  p.O = oracles::rotation_about_z(angle);
  return p;
}

BodyShape unit_square() {
  return BodyShape::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
}

}  // namespace

TEST_CASE("isometry application") {
  Placement id;
  CHECK(id.apply(Vec3(1, 2, 0)) == Vec3(1, 2, 0));

  Placement shift;
  shift.X = Vec3(1, 0, 0);
  CHECK(shift.apply(Vec3::Zero()) == Vec3(1, 0, 0));

  const Placement q = rot_z(M_PI / 2.0);
  CHECK((q.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-14);
}

TEST_CASE("isometries preserve pairwise distances") {
  for (int k = 0; k < 50; ++k) {
    Placement p = rot_z(oracles::uniform(-3, 3), oracles::random_vec3(2.0));
    const Vec3 a = oracles::random_vec3(5.0);
    const Vec3 b = oracles::random_vec3(5.0);
    CHECK(std::fabs((p.apply(a) - p.apply(b)).norm() - (a - b).norm()) < 1e-12);
  }
}

TEST_CASE("placement validation") {
  Placement p;
  p.O(0, 0) = 1.0 + 1e-6;
  CHECK_THROWS_AS(p.validate(), Error);
  Placement mirror;
  mirror.O = Mat3::Identity();
  mirror.O(2, 2) = -1.0;
  CHECK_THROWS_AS(mirror.validate(), Error);
}

TEST_CASE("signed distance disk") {
  const BodyShape disk = BodyShape::disk(1.0);
  Placement id;
  CHECK(signed_distance(disk, id, Vec3(0, 0, 0)) == doctest::Approx(-1.0));
  CHECK(signed_distance(disk, id, Vec3(3, 0, 0)) == doctest::Approx(2.0));
}

TEST_CASE("signed distance square polygon matches brute force") {
  const BodyShape sq = unit_square();
  Placement id;
  CHECK(signed_distance(sq, id, Vec3(0, 0, 0)) == doctest::Approx(-1.0));

  // brute force: min distance over densely sampled edges, sign by containment
  auto brute = [&](const Vec2& p) {
    double best = 1e300;
    const auto& v = sq.vertices();
    for (size_t i = 0; i < v.size(); ++i) {
      const Vec2 a = v[i], b = v[(i + 1) % v.size()];
      for (int k = 0; k <= 4000; ++k) {
        const Vec2 q = a + (b - a) * (k / 4000.0);
        best = std::min(best, (p - q).norm());
      }
    }
    const bool inside = std::fabs(p.x()) < 1.0 && std::fabs(p.y()) < 1.0;
    return inside ? -best : best;
  };
  for (int k = 0; k < 40; ++k) {
    const Vec2 p(oracles::uniform(-2.5, 2.5), oracles::uniform(-2.5, 2.5));
    const double got = signed_distance(sq, id, lift(p));
    CHECK(got == doctest::Approx(brute(p)).epsilon(1e-5));
  }
}

TEST_CASE("signed distance gradient has unit norm away from the medial axis") {
  const BodyShape disk = BodyShape::disk(1.0);
  const BodyShape sq = unit_square();
  Placement id;
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const Vec2 p(oracles::uniform(-2.5, 2.5), oracles::uniform(-2.5, 2.5));
    for (const BodyShape* s : {&disk, &sq}) {
      const double d = signed_distance(*s, id, lift(p));
      if (std::fabs(d) < 0.05) continue;          // gradient kink on the boundary
      if (s == &disk && p.norm() < 0.2) continue;  // medial point of the disk
      if (s == &sq && (std::fabs(p.x()) < 0.1 || std::fabs(p.y()) < 0.1) &&
          sq.signed_distance_local(lift(p)) < 0)
        continue;  // square medial cross
      auto f = [&](const Vec2& q) { return signed_distance(*s, id, lift(q)); };
      const double gn = oracles::grad2(f, p).norm();
      CHECK(gn == doctest::Approx(1.0).epsilon(1e-4));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("indicator sharp and mollified") {
  const BodyShape disk = BodyShape::disk(1.0);
  Placement id;
  CHECK(indicator(disk, id, Vec3(0, 0, 0), 0.0) == 1.0);
  CHECK(indicator(disk, id, Vec3(2, 0, 0), 0.0) == 0.0);
  // midpoint of the ramp sits on the boundary
  CHECK(indicator(disk, id, Vec3(1, 0, 0), 0.2) == doctest::Approx(0.5));
  // ramp endpoints
  CHECK(indicator(disk, id, Vec3(1.1, 0, 0), 0.2) == doctest::Approx(0.0));
  CHECK(indicator(disk, id, Vec3(0.9, 0, 0), 0.2) == doctest::Approx(1.0));
  // monotone along the ray and consistent with the chosen cubic ramp
  const double q1 = indicator(disk, id, Vec3(0.95, 0, 0), 0.2);
  const double t = 0.5 - (-0.05) / 0.2;
  CHECK(q1 == doctest::Approx(t * t * (3 - 2 * t)));
}

TEST_CASE("indicator with zero smoothing equals the distance sign") {
  const BodyShape sq = unit_square();
  const Placement p = rot_z(0.7, Vec3(0.3, -0.2, 0));
  for (int k = 0; k < 200; ++k) {
    const Vec3 x = lift(Vec2(oracles::uniform(-3, 3), oracles::uniform(-3, 3)));
    const double chi = indicator(sq, p, x, 0.0);
    const double d = signed_distance(sq, p, x);
    CHECK(chi == (d < 0.0 ? 1.0 : 0.0));
  }
}

TEST_CASE("boundary gap") {
  const Container box(Vec2(-4, -4), Vec2(4, 4));
  const BodyShape disk = BodyShape::disk(1.0);
  Placement centered;
  CHECK(boundary_gap(centered, disk, box) == doctest::Approx(3.0));
  Placement off;
  off.X = Vec3(2.5, 0, 0);
  CHECK(boundary_gap(off, disk, box) == doctest::Approx(0.5));
}

TEST_CASE("boundary gap of a polygon matches dense boundary sampling") {
  const Container box(Vec2(-4, -4), Vec2(4, 4));
  const BodyShape tri = BodyShape::polygon({{0, 0}, {2, 0.5}, {0.5, 1.5}});
  const Placement p = rot_z(0.4, Vec3(1.0, -1.5, 0));
  double oracle = 1e300;
  auto feed = [&](const Vec2& bp) {
    const Vec3 w = p.apply(lift(bp));
    const double dx = std::min(w.x() - box.lo.x(), box.hi.x() - w.x());
    const double dy = std::min(w.y() - box.lo.y(), box.hi.y() - w.y());
    oracle = std::min(oracle, std::min(dx, dy));
  };
  for (const auto& bs : tri.boundary_samples(20000)) feed(bs.point);
  for (const auto& v : tri.vertices()) feed(v);
  CHECK(boundary_gap(p, tri, box) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("boundary gap of a disk is rotation invariant") {
  const Container box(Vec2(-4, -4), Vec2(4, 4));
  const BodyShape disk = BodyShape::disk(0.8);
  const Vec3 at(1.2, 0.7, 0);
  const double base = boundary_gap(rot_z(0.0, at), disk, box);
  for (double a : {0.3, 1.1, 2.9, -0.8})
    CHECK(boundary_gap(rot_z(a, at), disk, box) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("marching squares recovers a circle") {
  const BodyShape disk = BodyShape::disk(1.0);
  Placement id;
  auto f = [&](const Vec2& p) { return signed_distance(disk, id, lift(p)); };
  const auto segs = marching_squares(f, Vec2(-2, -2), Vec2(2, 2), 160, 160);
  double length = 0.0;
  for (const auto& s : segs) {
    length += s.length;
    CHECK(std::fabs(s.midpoint.norm() - 1.0) < 0.02);
    // normal points outward (toward positive distance)
    CHECK(s.normal.dot(s.midpoint.normalized()) > 0.99);
  }
  CHECK(length == doctest::Approx(2 * M_PI).epsilon(2e-3));
}

TEST_CASE("container sanity") {
  CHECK_THROWS_AS(Container(Vec2(0, 0), Vec2(0, 1)), Error);
  const Container box(Vec2(0, 0), Vec2(2, 1));
  CHECK(box.area() == doctest::Approx(2.0));
  CHECK(box.wall_distance(Vec2(0.5, 0.5)) == doctest::Approx(0.5));
  CHECK(!box.contains(Vec2(-0.1, 0.5)));
}
