#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "types.hpp"

namespace rigidflow {

// Dense row-major scalar field, index (i, j) with i the x index.
class Field2 {
 public:
  Field2() = default;
  Field2(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<size_t>(nx) * ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  size_t size() const { return data_.size(); }

  double& operator()(int i, int j) {
    assert(i >= 0 && i < nx_ && j >= 0 && j < ny_);
    return data_[static_cast<size_t>(j) * nx_ + i];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < nx_ && j >= 0 && j < ny_);
    return data_[static_cast<size_t>(j) * nx_ + i];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
  }

  bool same_shape(const Field2& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

// Bilinear interpolation on a lattice with node (i, j) at
// origin + (i*h, j*h). Queries are clamped to the lattice hull.
inline double bilinear(const Field2& f, const Vec2& origin, double h, const Vec2& p) {
  double x = (p.x() - origin.x()) / h;
  double y = (p.y() - origin.y()) / h;
  x = std::clamp(x, 0.0, static_cast<double>(f.nx() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(f.ny() - 1));
  int i0 = std::min(static_cast<int>(x), f.nx() - 2);
  int j0 = std::min(static_cast<int>(y), f.ny() - 2);
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  const double fx = x - i0;
  const double fy = y - j0;
  const double a = f(i0, j0) * (1.0 - fx) + f(i0 + 1, j0) * fx;
  const double b = f(i0, j0 + 1) * (1.0 - fx) + f(i0 + 1, j0 + 1) * fx;
  return a * (1.0 - fy) + b * fy;
}

// Value and exact in-patch gradient of the bilinear interpolant.
struct BilinearSample {
  double value;
  double ddx;
  double ddy;
};

inline BilinearSample bilinear_with_grad(const Field2& f, const Vec2& origin, double h,
                                         const Vec2& p) {
  double x = (p.x() - origin.x()) / h;
  double y = (p.y() - origin.y()) / h;
  x = std::clamp(x, 0.0, static_cast<double>(f.nx() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(f.ny() - 1));
  int i0 = std::min(static_cast<int>(x), f.nx() - 2);
  int j0 = std::min(static_cast<int>(y), f.ny() - 2);
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  const double fx = x - i0;
  const double fy = y - j0;
  const double a = f(i0, j0), b = f(i0 + 1, j0), c = f(i0, j0 + 1), d = f(i0 + 1, j0 + 1);
  BilinearSample out;
  out.value = a * (1 - fx) * (1 - fy) + b * fx * (1 - fy) + c * (1 - fx) * fy + d * fx * fy;
  out.ddx = ((b - a) * (1 - fy) + (d - c) * fy) / h;
  out.ddy = ((c - a) * (1 - fx) + (d - b) * fx) / h;
  return out;
}

}  // namespace rigidflow
