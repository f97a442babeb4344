#include "poisson.hpp"

#include <cmath>
#include <numeric>

namespace rigidflow {

void apply_laplacian_neumann(const Grid& grid, const Field2& p, Field2& out) {
  const int nx = grid.nx, ny = grid.ny;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = p(i, j);
      double acc = 0.0;
      if (i > 0) acc += p(i - 1, j) - c;
      if (i < nx - 1) acc += p(i + 1, j) - c;
      if (j > 0) acc += p(i, j - 1) - c;
      if (j < ny - 1) acc += p(i, j + 1) - c;
      out(i, j) = acc * inv_h2;
    }
  }
}

namespace {

double dot(const Field2& a, const Field2& b) {
  const double* pa = a.data();
  const double* pb = b.data();
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += pa[k] * pb[k];
  return s;
}

void remove_mean(Field2& f) {
  double s = std::accumulate(f.raw().begin(), f.raw().end(), 0.0);
  const double mean = s / f.size();
  for (double& v : f.raw()) v -= mean;
}

}  // namespace

PoissonResult solve_poisson_neumann(const Grid& grid, const Field2& rhs, Field2& p,
                                    double rel_tol, int max_iters) {
  const int n = grid.nx * grid.ny;
  if (max_iters <= 0) max_iters = 20 * (grid.nx + grid.ny) + 200;

  // CG runs on the SPD operator -lap, so the right side flips sign.
  Field2 b = rhs;
  for (double& v : b.raw()) v = -v;
  remove_mean(b);

  if (p.nx() != grid.nx || p.ny() != grid.ny) p = Field2(grid.nx, grid.ny);
  p.fill(0.0);

  Field2 r = b;
  Field2 q = r;  // search direction
  Field2 aq(grid.nx, grid.ny);

  const double b_norm = std::sqrt(dot(b, b));
  const double target = std::max(rel_tol * b_norm, 1e-300);
  double rr = dot(r, r);
  PoissonResult res;
  res.residual = std::sqrt(rr);
  if (res.residual <= target || b_norm == 0.0) return res;

  for (int it = 0; it < max_iters; ++it) {
    apply_laplacian_neumann(grid, q, aq);
    // CG on the negative (SPD) operator.
    const double qaq = -dot(q, aq);
    if (qaq <= 0.0) break;
    const double alpha = rr / qaq;
    double* pp = p.data();
    const double* pq = q.data();
    double* pr = r.data();
    const double* paq = aq.data();
    for (int k = 0; k < n; ++k) {
      pp[k] += alpha * pq[k];
      pr[k] += alpha * paq[k];
    }
    const double rr_new = dot(r, r);
    res.iterations = it + 1;
    res.residual = std::sqrt(rr_new);
    if (res.residual <= target) {
      remove_mean(p);
      return res;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int k = 0; k < n; ++k) q.raw()[k] = pr[k] + beta * pq[k];
    if ((it + 1) % 50 == 0) remove_mean(r);
  }
  throw Error(ErrorCode::PoissonDiverged,
              "pressure solve residual " + std::to_string(res.residual) + " after " +
                  std::to_string(res.iterations) + " iterations (target " +
                  std::to_string(target) + ")");
}

}  // namespace rigidflow
