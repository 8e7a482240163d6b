#include "crackfield/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crackfield {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void Stencil5::add_face_sums(std::span<const double> south_boundary,
                             std::span<const double> north_boundary) {
  const int n1 = grid.n1;
  const int n2 = grid.n2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = grid.index(i, j);
      const double w = i > 0 ? east[k - 1] : 0.0;
      const double e = i + 1 < n1 ? east[k] : 0.0;
      const double s = j > 0 ? north[k - n1] : (south_boundary.empty() ? 0.0 : south_boundary[i]);
      const double n = j + 1 < n2 ? north[k] : (north_boundary.empty() ? 0.0 : north_boundary[i]);
      diag[k] += (w + e) + (s + n);
    }
  }
}

void Stencil5::apply(std::span<const double> x, std::span<double> y) const {
  const int n1 = grid.n1;
  const int n2 = grid.n2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = grid.index(i, j);
      const double w = i > 0 ? east[k - 1] * x[k - 1] : 0.0;
      const double e = i + 1 < n1 ? east[k] * x[k + 1] : 0.0;
      const double s = j > 0 ? north[k - n1] * x[k - n1] : 0.0;
      const double n = j + 1 < n2 ? north[k] * x[k + n1] : 0.0;
      y[k] = diag[k] * x[k] - ((w + e) + (s + n));
    }
  }
}

double Stencil5::entry(std::size_t row, std::size_t col) const {
  const std::size_t n1 = static_cast<std::size_t>(grid.n1);
  if (row == col) return diag[row];
  const std::size_t lo = std::min(row, col);
  const std::size_t hi = std::max(row, col);
  if (hi == lo + 1 && (lo % n1) + 1 < n1) return -east[lo];
  if (hi == lo + n1) return -north[lo];
  return 0.0;
}

namespace {

std::vector<double> factor(const Stencil5& A, double relaxation) {
  const int n1 = A.grid.n1;
  const int n2 = A.grid.n2;
  std::vector<double> pivot(A.grid.cell_count());
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = A.grid.index(i, j);
      double d = A.diag[k];
      if (i > 0) {
        const std::size_t w = k - 1;
        const double c = A.east[w];
        d -= c * (c + relaxation * (j + 1 < n2 ? A.north[w] : 0.0)) / pivot[w];
      }
      if (j > 0) {
        const std::size_t s = k - n1;
        const double c = A.north[s];
        d -= c * (c + relaxation * (i + 1 < n1 ? A.east[s] : 0.0)) / pivot[s];
      }
      // Breakdown guard: fall back to the Jacobi pivot.
      pivot[k] = d > 1e-3 * A.diag[k] ? d : A.diag[k];
    }
  }
  return pivot;
}

// (D - L) D^{-1} (D - L^T) z = r, L holding the conductances.
void sweep(const Stencil5& A, const std::vector<double>& pivot, std::span<const double> r,
           std::span<double> z) {
  const int n1 = A.grid.n1;
  const int n2 = A.grid.n2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = A.grid.index(i, j);
      double acc = r[k];
      if (i > 0) acc += A.east[k - 1] * z[k - 1];
      if (j > 0) acc += A.north[k - n1] * z[k - n1];
      z[k] = acc / pivot[k];
    }
  }
  for (int j = n2 - 1; j >= 0; --j) {
    for (int i = n1 - 1; i >= 0; --i) {
      const std::size_t k = A.grid.index(i, j);
      double acc = 0.0;
      if (i + 1 < n1) acc += A.east[k] * z[k + 1];
      if (j + 1 < n2) acc += A.north[k] * z[k + n1];
      z[k] += acc / pivot[k];
    }
  }
}

// Row j <-> row n2 - 1 - j.
void reflect_rows(const GridSpec& g, std::span<const double> in, std::span<double> out) {
  for (int j = 0; j < g.n2; ++j) {
    const auto src = in.begin() + static_cast<std::ptrdiff_t>(g.index(0, g.n2 - 1 - j));
    std::copy(src, src + g.n1, out.begin() + static_cast<std::ptrdiff_t>(g.index(0, j)));
  }
}

Stencil5 reflect(const Stencil5& A) {
  const GridSpec& g = A.grid;
  Stencil5 m(g);
  reflect_rows(g, A.diag, m.diag);
  reflect_rows(g, A.east, m.east);
  for (int j = 0; j + 1 < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) m.north[g.index(i, j)] = A.north[g.index(i, g.n2 - 2 - j)];
  }
  return m;
}

}  // namespace

IncompleteCholesky::IncompleteCholesky(const Stencil5& A, double relaxation)
    : A_(&A),
      mirrored_(reflect(A)),
      pivot_(factor(A, relaxation)),
      mirrored_pivot_(factor(mirrored_, relaxation)),
      scratch_r_(A.grid.cell_count()),
      scratch_z_(A.grid.cell_count()) {}

void IncompleteCholesky::apply(std::span<const double> r, std::span<double> z) const {
  const GridSpec& g = A_->grid;
  sweep(*A_, pivot_, r, z);
  reflect_rows(g, r, scratch_r_);
  sweep(mirrored_, mirrored_pivot_, scratch_r_, scratch_z_);
  reflect_rows(g, scratch_z_, scratch_r_);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = 0.5 * (z[k] + scratch_r_[k]);
}

SolveResult solve_pcg(const Stencil5& A, std::span<const double> b, std::span<double> x,
                      const SolverOptions& opts) {
  const std::size_t n = b.size();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * (A.grid.n1 + A.grid.n2);
  SolveResult result;

  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }

  const IncompleteCholesky precond(A);
  std::vector<double> r(n), z(n), p(n), q(n);
  int it = 0;
  // The outer loop restarts from the true residual whenever the recurrence
  // claims convergence it has not reached.
  for (;;) {
    A.apply(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    const double true_res = std::sqrt(dot(r, r)) / b_norm;
    result.iterations = it;
    result.residual = true_res;
    if (true_res <= opts.tol) {
      result.converged = true;
      return result;
    }
    if (it >= max_iter) return result;

    precond.apply(r, z);
    p = z;
    double rz = dot(r, z);
    while (it < max_iter) {
      ++it;
      A.apply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * q[k];
      }
      if (std::sqrt(dot(r, r)) / b_norm <= opts.tol) break;
      precond.apply(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
  }
}

}  // namespace crackfield
