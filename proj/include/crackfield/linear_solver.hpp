#pragma once

#include <span>
#include <vector>

#include "crackfield/grid.hpp"

namespace crackfield {

/// Symmetric 5-point operator on a cell grid. Off-diagonal entries are
/// stored as non-negative conductances: A(k, k+1) = -east[k] and
/// A(k, k+n1) = -north[k].
struct Stencil5 {
  GridSpec grid;
  std::vector<double> diag;
  std::vector<double> east;
  std::vector<double> north;

  explicit Stencil5(const GridSpec& g)
      : grid(g), diag(g.cell_count(), 0.0), east(g.cell_count(), 0.0), north(g.cell_count(), 0.0) {}

  /// diag += (west + east) + (south + north) per cell, grouped so that cells
  /// mirrored about the midline get bit-identical sums. `south_boundary` and
  /// `north_boundary` (length n1) stand in for the missing faces of the
  /// first and last rows; empty means zero.
  void add_face_sums(std::span<const double> south_boundary = {},
                     std::span<const double> north_boundary = {});

  void apply(std::span<const double> x, std::span<double> y) const;
  double entry(std::size_t row, std::size_t col) const;
};

/// Incomplete Cholesky factorization with zero fill. A non-zero `relaxation`
/// moves that fraction of the dropped fill onto the diagonal (modified IC).
/// Two factorizations are kept, one per row ordering (bottom-up and
/// top-down), and apply() averages them. The result commutes with the
/// reflection x2 -> H - x2 whenever the operator does.
class IncompleteCholesky {
public:
  explicit IncompleteCholesky(const Stencil5& A, double relaxation = 0.97);
  /// z = M^{-1} r
  void apply(std::span<const double> r, std::span<double> z) const;

private:
  const Stencil5* A_;
  Stencil5 mirrored_;
  std::vector<double> pivot_;
  std::vector<double> mirrored_pivot_;
  mutable std::vector<double> scratch_r_;
  mutable std::vector<double> scratch_z_;
};

struct SolverOptions {
  double tol = 1e-8;  ///< relative residual ||Ax-b|| / ||b||
  int max_iter = 0;   ///< 0 selects 20 (n1 + n2)
};

struct SolveResult {
  int iterations = 0;
  double residual = 0.0;  ///< relative true residual at exit
  bool converged = false;
};

/// Preconditioned conjugate gradients starting from the contents of `x`.
/// Never throws; callers decide what a missed tolerance means.
SolveResult solve_pcg(const Stencil5& A, std::span<const double> b, std::span<double> x,
                      const SolverOptions& opts);

}  // namespace crackfield
