#include "geometry.hpp"

#include <cmath>

#include "field.hpp"

namespace rigidflow {

Container::Container(const Vec2& lo_, const Vec2& hi_) : lo(lo_), hi(hi_) {
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
    throw Error(ErrorCode::ConfigInvalid, "container side lengths must be positive");
}

double Container::wall_distance(const Vec2& p) const {
  const double dx = std::min(p.x() - lo.x(), hi.x() - p.x());
  const double dy = std::min(p.y() - lo.y(), hi.y() - p.y());
  return std::min(dx, dy);
}

bool Container::contains(const Vec2& p) const { return wall_distance(p) >= 0.0; }

namespace {

double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool point_in_polygon(const std::vector<Vec2>& v, const Vec2& p) {
  bool inside = false;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const bool cross = (v[i].y() > p.y()) != (v[j].y() > p.y());
    if (cross) {
      const double t = (p.y() - v[i].y()) / (v[j].y() - v[i].y());
      const double xx = v[i].x() + t * (v[j].x() - v[i].x());
      if (p.x() < xx) inside = !inside;
    }
  }
  return inside;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

BodyShape BodyShape::disk(double radius, const Density& density) {
  if (!(radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "disk radius must be positive");
  BodyShape s;
  s.kind_ = ShapeKind::Disk;
  s.radius_ = radius;
  s.density_ = density;
  s.recenter_mass();
  return s;
}

BodyShape BodyShape::ball(double radius, const Density& density) {
  if (!(radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "ball radius must be positive");
  BodyShape s;
  s.kind_ = ShapeKind::Ball;
  s.radius_ = radius;
  s.density_ = density;
  s.recenter_mass();
  return s;
}

BodyShape BodyShape::polygon(std::vector<Vec2> vertices, const Density& density) {
  if (vertices.size() < 3)
    throw Error(ErrorCode::ConfigInvalid, "polygon needs at least 3 vertices");
  if (polygon_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (!(polygon_area(vertices) > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "polygon must have positive area");
  BodyShape s;
  s.kind_ = ShapeKind::Polygon;
  s.verts_ = std::move(vertices);
  s.density_ = density;
  s.recenter_mass();
  return s;
}

void BodyShape::recenter_mass() {
  // Locate the mass center in the authored frame by midpoint quadrature,
  // then shift the geometry so it sits at the local origin.
  Vec2 mc = Vec2::Zero();
  const bool uniform = density_.grad.norm() == 0.0;
  if (kind_ == ShapeKind::Polygon || !uniform) {
    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    if (kind_ == ShapeKind::Polygon) {
      lo_x = hi_x = verts_[0].x();
      lo_y = hi_y = verts_[0].y();
      for (const Vec2& v : verts_) {
        lo_x = std::min(lo_x, v.x());
        hi_x = std::max(hi_x, v.x());
        lo_y = std::min(lo_y, v.y());
        hi_y = std::max(hi_y, v.y());
      }
    } else {
      lo_x = lo_y = -radius_;
      hi_x = hi_y = radius_;
    }
    const int n = 600;
    const double hx = (hi_x - lo_x) / n;
    const double hy = (hi_y - lo_y) / n;
    double mass = 0.0;
    Vec2 moment = Vec2::Zero();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 q(lo_x + (i + 0.5) * hx, lo_y + (j + 0.5) * hy);
        bool inside;
        if (kind_ == ShapeKind::Polygon)
          inside = point_in_polygon(verts_, q);
        else
          inside = q.norm() < radius_;
        if (!inside) continue;
        const double rho = density_(q);
        if (!(rho > 0.0))
          throw Error(ErrorCode::ConfigInvalid, "body density must stay positive");
        mass += rho;
        moment += rho * q;
      }
    }
    if (!(mass > 0.0)) throw Error(ErrorCode::ConfigInvalid, "body has no mass");
    mc = moment / mass;
    // Planar density on a ball: the z symmetry leaves only the in-plane
    // offset, which the disk quadrature above already approximates well
    // (the exact ball offset differs by a shape factor).
    if (kind_ == ShapeKind::Ball && !uniform) {
      const double m = density_.base * 4.0 / 3.0 * M_PI * std::pow(radius_, 3);
      mc = density_.grad * (4.0 * M_PI * std::pow(radius_, 5) / 15.0) / m;
    }
  }
  frame_shift_ = mc;
  if (kind_ == ShapeKind::Polygon) {
    for (Vec2& v : verts_) v -= mc;
    bound_radius_ = 0.0;
    for (const Vec2& v : verts_) bound_radius_ = std::max(bound_radius_, v.norm());
  } else {
    bound_radius_ = radius_ + mc.norm();
  }
}

double BodyShape::signed_distance_local(const Vec3& p) const {
  switch (kind_) {
    case ShapeKind::Disk: {
      const Vec2 c = -frame_shift_;
      return (Vec2(p.x(), p.y()) - c).norm() - radius_;
    }
    case ShapeKind::Ball: {
      const Vec3 c(-frame_shift_.x(), -frame_shift_.y(), 0.0);
      return (p - c).norm() - radius_;
    }
    case ShapeKind::Polygon: {
      const Vec2 q(p.x(), p.y());
      double d = std::numeric_limits<double>::max();
      for (size_t i = 0; i < verts_.size(); ++i) {
        d = std::min(d, segment_distance(verts_[i], verts_[(i + 1) % verts_.size()], q));
      }
      return point_in_polygon(verts_, q) ? -d : d;
    }
  }
  return 0.0;
}

std::vector<BodyShape::BoundarySample> BodyShape::boundary_samples(int n) const {
  std::vector<BoundarySample> out;
  if (kind_ == ShapeKind::Disk || kind_ == ShapeKind::Ball) {
    const Vec2 c = -frame_shift_;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * M_PI * (k + 0.5) / n;
      const Vec2 nrm(std::cos(th), std::sin(th));
      out.push_back({c + radius_ * nrm, nrm, 2.0 * M_PI * radius_ / n});
    }
    return out;
  }
  double per = 0.0;
  for (size_t i = 0; i < verts_.size(); ++i)
    per += (verts_[(i + 1) % verts_.size()] - verts_[i]).norm();
  for (size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    const double len = (b - a).norm();
    const int m = std::max(1, static_cast<int>(std::lround(n * len / per)));
    const Vec2 dir = (b - a) / len;
    const Vec2 nrm(dir.y(), -dir.x());  // outward for CCW orientation
    for (int k = 0; k < m; ++k) {
      out.push_back({a + dir * len * (k + 0.5) / m, nrm, len / m});
    }
  }
  return out;
}

std::string BodyShape::describe() const {
  switch (kind_) {
    case ShapeKind::Disk: return "disk(r=" + std::to_string(radius_) + ")";
    case ShapeKind::Ball: return "ball(r=" + std::to_string(radius_) + ")";
    case ShapeKind::Polygon:
      return "polygon(" + std::to_string(verts_.size()) + " vertices)";
  }
  return "?";
}

void Placement::validate(double tol) const {
  const double ortho = (O.transpose() * O - Mat3::Identity()).norm();
  if (ortho > tol)
    throw Error(ErrorCode::ConfigInvalid, "placement rotation is not orthogonal");
  if (std::fabs(O.determinant() - 1.0) > tol)
    throw Error(ErrorCode::ConfigInvalid, "placement rotation must have det 1");
}

double signed_distance(const BodyShape& shape, const Placement& p, const Vec3& x) {
  return shape.signed_distance_local(p.to_body(x));
}

double indicator(const BodyShape& shape, const Placement& p, const Vec3& x, double smoothing) {
  const double d = signed_distance(shape, p, x);
  if (smoothing <= 0.0) return d < 0.0 ? 1.0 : 0.0;
  return smoothstep(0.5 - d / smoothing);
}

double boundary_gap(const Placement& p, const BodyShape& shape, const Container& c) {
  if (shape.kind() == ShapeKind::Polygon) {
    double gap = std::numeric_limits<double>::max();
    for (const Vec2& v : shape.vertices()) {
      const Vec3 w = p.apply(lift(v));
      gap = std::min(gap, c.wall_distance(drop(w)));
    }
    return std::max(gap, 0.0);
  }
  // Disk and ball: exact via the geometric center.
  const Vec3 cw = p.apply(lift(shape.geometric_center_local()));
  const double d = c.wall_distance(drop(cw)) - shape.radius();
  return std::max(d, 0.0);
}

std::vector<LevelSetSegment> marching_squares(
    const std::function<double(const Vec2&)>& field, const Vec2& lo, const Vec2& hi,
    int nx, int ny) {
  std::vector<LevelSetSegment> segs;
  const double hx = (hi.x() - lo.x()) / nx;
  const double hy = (hi.y() - lo.y()) / ny;

  Field2 vals(nx + 1, ny + 1);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vals(i, j) = field(Vec2(lo.x() + i * hx, lo.y() + j * hy));

  auto edge_point = [&](const Vec2& a, const Vec2& b, double fa, double fb) {
    const double t = fa / (fa - fb);
    return a + t * (b - a);
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 p00(lo.x() + i * hx, lo.y() + j * hy);
      const Vec2 p10 = p00 + Vec2(hx, 0.0);
      const Vec2 p01 = p00 + Vec2(0.0, hy);
      const Vec2 p11 = p00 + Vec2(hx, hy);
      const double f00 = vals(i, j), f10 = vals(i + 1, j);
      const double f01 = vals(i, j + 1), f11 = vals(i + 1, j + 1);

      std::vector<Vec2> pts;
      if ((f00 < 0.0) != (f10 < 0.0)) pts.push_back(edge_point(p00, p10, f00, f10));
      if ((f10 < 0.0) != (f11 < 0.0)) pts.push_back(edge_point(p10, p11, f10, f11));
      if ((f11 < 0.0) != (f01 < 0.0)) pts.push_back(edge_point(p11, p01, f11, f01));
      if ((f01 < 0.0) != (f00 < 0.0)) pts.push_back(edge_point(p01, p00, f01, f00));
      if (pts.size() != 2) continue;  // ambiguous saddle cells are rare and skipped

      const Vec2 mid = 0.5 * (pts[0] + pts[1]);
      const double eps = 1e-5 * std::min(hx, hy);
      Vec2 g((field(mid + Vec2(eps, 0)) - field(mid - Vec2(eps, 0))) / (2 * eps),
             (field(mid + Vec2(0, eps)) - field(mid - Vec2(0, eps))) / (2 * eps));
      const double gn = g.norm();
      if (gn == 0.0) continue;
      segs.push_back({mid, g / gn, (pts[1] - pts[0]).norm()});
    }
  }
  return segs;
}

}  // namespace rigidflow
