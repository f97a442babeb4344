#pragma once

#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace rigidflow {

// Axis-aligned container. The fluid solve lives in the x-y rectangle;
// the z extent only matters for the embedded 3D algebra tests.
struct Container {
  Vec2 lo = Vec2(-1.0, -1.0);
  Vec2 hi = Vec2(1.0, 1.0);

  Container() = default;
  Container(const Vec2& lo_, const Vec2& hi_);

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }

  // Distance from an interior point to the nearest wall (negative outside).
  double wall_distance(const Vec2& p) const;
  bool contains(const Vec2& p) const;
};

// Body density in the reference frame, affine and bounded below.
struct Density {
  double base = 1.0;
  Vec2 grad = Vec2::Zero();

  double operator()(const Vec2& body_pt) const { return base + grad.dot(body_pt); }
};

enum class ShapeKind { Disk, Ball, Polygon };

// Reference body with its mass center at the local origin. Disk and polygon
// are z-invariant sections; ball is the true 3D shape used by the rigid-body
// algebra tests.
class BodyShape {
 public:
  static BodyShape disk(double radius, const Density& density = Density{});
  static BodyShape ball(double radius, const Density& density = Density{});
  static BodyShape polygon(std::vector<Vec2> vertices, const Density& density = Density{});

  ShapeKind kind() const { return kind_; }
  double radius() const { return radius_; }
  const std::vector<Vec2>& vertices() const { return verts_; }
  const Density& density() const { return density_; }
  bool planar() const { return kind_ != ShapeKind::Ball; }

  // Signed distance in the body frame, negative inside.
  double signed_distance_local(const Vec3& p) const;

  double density_at(const Vec3& body_pt) const {
    return density_(Vec2(body_pt.x(), body_pt.y()) + frame_shift_);
  }

  // Radius of a bounding sphere about the mass center.
  double bounding_radius() const { return bound_radius_; }

  // Geometric center (disk/ball) in the mass-centered local frame.
  Vec2 geometric_center_local() const { return -frame_shift_; }

  // Exact boundary parameterization in the body frame, n points with matching
  // outward normals and arc-length weights. Planar shapes only.
  struct BoundarySample {
    Vec2 point;
    Vec2 normal_out;
    double weight;
  };
  std::vector<BoundarySample> boundary_samples(int n) const;

  std::string describe() const;

 private:
  BodyShape() = default;
  void recenter_mass();

  ShapeKind kind_ = ShapeKind::Disk;
  double radius_ = 1.0;
  std::vector<Vec2> verts_;
  Density density_;
  Vec2 frame_shift_ = Vec2::Zero();  // maps local frame to authored frame
  double bound_radius_ = 1.0;
};

// Rigid placement x -> X + O x.
struct Placement {
  Vec3 X = Vec3::Zero();
  Mat3 O = Mat3::Identity();

  void validate(double tol = 1e-10) const;
  Vec3 apply(const Vec3& body_pt) const { return X + O * body_pt; }
  Vec3 to_body(const Vec3& world_pt) const { return O.transpose() * (world_pt - X); }
};

double signed_distance(const BodyShape& shape, const Placement& p, const Vec3& x);

// Sharp indicator for smoothing == 0, else a cubic ramp of total width
// `smoothing` around the boundary with value 1/2 on it.
double indicator(const BodyShape& shape, const Placement& p, const Vec3& x, double smoothing);

double boundary_gap(const Placement& p, const BodyShape& shape, const Container& c);

// Zero level set of a sampled scalar field as a polyline soup (marching
// squares): segment midpoints with normals (along -grad) and lengths.
struct LevelSetSegment {
  Vec2 midpoint;
  Vec2 normal;  // unit, pointing toward positive field values
  double length;
};
std::vector<LevelSetSegment> marching_squares(
    const std::function<double(const Vec2&)>& field, const Vec2& lo, const Vec2& hi,
    int nx, int ny);

}  // namespace rigidflow
