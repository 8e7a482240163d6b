#pragma once

#include <array>
#include <vector>

namespace crackfield {

/// T_0..T_n at s together with first and second derivatives in s.
struct ChebBasis {
  std::vector<double> t, dt, d2t;
};

ChebBasis chebyshev_basis(int degree, double s);

/// Affine map of [lo, hi] onto [-1, 1].
struct ChebAxis {
  double lo = -1.0;
  double hi = 1.0;
  int degree = 7;

  double to_unit(double x) const { return (2.0 * x - lo - hi) / (hi - lo); }
  double scale() const { return 2.0 / (hi - lo); }
};

/// Tensor-product Chebyshev polynomial in (x1, x2, t).
class PolyFit {
public:
  PolyFit() = default;
  PolyFit(std::array<ChebAxis, 3> axes, std::vector<double> coeffs);

  /// Mixed derivative of order (o1, o2, ot), each in 0..2.
  double derivative(double x1, double x2, double t, int o1, int o2, int ot) const;

  double value(double x1, double x2, double t) const { return derivative(x1, x2, t, 0, 0, 0); }
  double d_x1(double x1, double x2, double t) const { return derivative(x1, x2, t, 1, 0, 0); }
  double d_x2(double x1, double x2, double t) const { return derivative(x1, x2, t, 0, 1, 0); }
  double d_t(double x1, double x2, double t) const { return derivative(x1, x2, t, 0, 0, 1); }
  double laplacian(double x1, double x2, double t) const {
    return derivative(x1, x2, t, 2, 0, 0) + derivative(x1, x2, t, 0, 2, 0);
  }

  const std::array<ChebAxis, 3>& axes() const { return axes_; }
  /// Coefficient c[a][b][c] stored at (a * (n2+1) + b) * (nt+1) + c.
  const std::vector<double>& coefficients() const { return coeffs_; }

private:
  std::array<ChebAxis, 3> axes_{};
  std::vector<double> coeffs_;
};

/// Least-squares tensor fit to values sampled on a rectilinear grid of
/// equispaced nodes. `values` is indexed [(i * n2 + j) * nt + k] for node i on
/// axis 1, j on axis 2, k on axis 3; each axis spans [lo, hi] of its ChebAxis
/// with `counts[a]` nodes. The pseudo-inverse of the Kronecker Vandermonde
/// factorizes, so it is applied one axis at a time. Throws RankDeficient when
/// an axis has fewer nodes than degree + 1.
PolyFit fit_tensor(const std::array<ChebAxis, 3>& axes, const std::array<int, 3>& counts,
                   const std::vector<double>& values);

}  // namespace crackfield
