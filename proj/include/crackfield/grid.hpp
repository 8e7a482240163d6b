#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crackfield {

/// Uniform cell-centered grid on (0,L) x (0,H).
struct GridSpec {
  double L = 5.0;
  double H = 1.0;
  double dx = 0.01;
  double dy = 0.01;
  int n1 = 500;
  int n2 = 100;

  std::size_t cell_count() const { return static_cast<std::size_t>(n1) * n2; }
  /// Row-major storage: x1 index runs fastest.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * n1 + i;
  }
  double x1(int i) const { return (i + 0.5) * dx; }
  double x2(int j) const { return (j + 0.5) * dy; }

  /// Index of the cell center nearest to x1 (clamped into the grid).
  int nearest_i(double x) const;
  int nearest_j(double y) const;

  bool operator==(const GridSpec&) const = default;
};

/// Builds a grid of square cells; throws NonIntegralDivision when L/dx or
/// H/dx is not an integer to within 1e-9.
GridSpec make_grid(double L, double H, double dx);

/// Throws std::invalid_argument if the invariants of `g` do not hold.
void validate(const GridSpec& g);

/// One real per cell at centers ((i+1/2)dx, (j+1/2)dy).
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double fill = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double min() const;
  double max() const;
  bool all_finite() const;

private:
  GridSpec grid_{};
  std::vector<double> values_;
};

/// Bilinear interpolation of cell-centered values. Points outside the hull of
/// cell centers are clamped onto it.
double bilinear_sample(const ScalarField& f, double x1, double x2);

/// Per-cell gradient components. Centered differences in the interior,
/// second-order one-sided differences on the outermost cells.
struct GradientField {
  ScalarField d1;
  ScalarField d2;
};

GradientField gradient(const ScalarField& f);

/// |grad f|^2 per cell using gradient().
ScalarField gradient_squared(const ScalarField& f);

}  // namespace crackfield
