#pragma once

#include "errors.hpp"
#include "field.hpp"
#include "types.hpp"

namespace rigidflow {

// Uniform MAC layout over the rectangle [lo, lo + (nx*h, ny*h)]:
// u on vertical faces, v on horizontal faces, p at cell centers.
struct Grid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 lo = Vec2::Zero();

  Vec2 hi() const { return lo + Vec2(nx * h, ny * h); }
  double area() const { return nx * h * ny * h; }

  Vec2 center(int i, int j) const { return lo + Vec2((i + 0.5) * h, (j + 0.5) * h); }
  Vec2 u_face(int i, int j) const { return lo + Vec2(i * h, (j + 0.5) * h); }
  Vec2 v_face(int i, int j) const { return lo + Vec2((i + 0.5) * h, j * h); }
  Vec2 node(int i, int j) const { return lo + Vec2(i * h, j * h); }

  bool inside(const Vec2& p) const {
    const Vec2 top = hi();
    return p.x() >= lo.x() && p.x() <= top.x() && p.y() >= lo.y() && p.y() <= top.y();
  }

  Vec2 clamp(const Vec2& p) const {
    const Vec2 top = hi();
    return Vec2(std::clamp(p.x(), lo.x(), top.x()), std::clamp(p.y(), lo.y(), top.y()));
  }

  bool operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && h == o.h && (lo - o.lo).norm() == 0.0;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct StaggeredField {
  Grid grid;
  Field2 u;  // (nx+1) x ny
  Field2 v;  // nx x (ny+1)
  Field2 p;  // nx x ny

  StaggeredField() = default;
  explicit StaggeredField(const Grid& g)
      : grid(g), u(g.nx + 1, g.ny), v(g.nx, g.ny + 1), p(g.nx, g.ny) {}

  double sample_u(const Vec2& pos) const {
    return bilinear(u, grid.lo + Vec2(0.0, 0.5 * grid.h), grid.h, pos);
  }
  double sample_v(const Vec2& pos) const {
    return bilinear(v, grid.lo + Vec2(0.5 * grid.h, 0.0), grid.h, pos);
  }
  Vec2 sample_velocity(const Vec2& pos) const {
    return Vec2(sample_u(pos), sample_v(pos));
  }

  // Cell-centered velocity by face averaging.
  Vec2 center_velocity(int i, int j) const {
    return Vec2(0.5 * (u(i, j) + u(i + 1, j)), 0.5 * (v(i, j) + v(i, j + 1)));
  }

  double divergence(int i, int j) const {
    return (u(i + 1, j) - u(i, j) + v(i, j + 1) - v(i, j)) / grid.h;
  }

  double max_divergence() const {
    double m = 0.0;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) m = std::max(m, std::fabs(divergence(i, j)));
    return m;
  }

  double max_speed() const {
    return std::max(u.max_abs(), v.max_abs());
  }

  void enforce_wall_normals() {
    for (int j = 0; j < grid.ny; ++j) {
      u(0, j) = 0.0;
      u(grid.nx, j) = 0.0;
    }
    for (int i = 0; i < grid.nx; ++i) {
      v(i, 0) = 0.0;
      v(i, grid.ny) = 0.0;
    }
  }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw Error(ErrorCode::GridMismatch, what);
}

}  // namespace rigidflow
