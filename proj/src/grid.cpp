#include "crackfield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crackfield/errors.hpp"

namespace crackfield {

namespace {

int checked_division(double length, double dx, const char* name) {
  const double ratio = length / dx;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
    throw NonIntegralDivision(std::string(name) + "/dx = " + std::to_string(ratio) +
                              " is not an integer");
  }
  return static_cast<int>(rounded);
}

// Derivative along one axis at position k of a line of n samples spaced h.
template <class Get>
double line_derivative(Get&& get, int k, int n, double h) {
  if (n < 2) return 0.0;
  if (n < 3) return (get(1) - get(0)) / h;
  if (k == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h);
  return (get(k + 1) - get(k - 1)) / (2.0 * h);
}

}  // namespace

int GridSpec::nearest_i(double x) const {
  const int i = static_cast<int>(std::lround(x / dx - 0.5));
  return std::clamp(i, 0, n1 - 1);
}

int GridSpec::nearest_j(double y) const {
  const int j = static_cast<int>(std::lround(y / dy - 0.5));
  return std::clamp(j, 0, n2 - 1);
}

GridSpec make_grid(double L, double H, double dx) {
  if (!(L > 0.0) || !(H > 0.0) || !(dx > 0.0)) {
    throw std::invalid_argument("make_grid: L, H and dx must be positive");
  }
  GridSpec g;
  g.L = L;
  g.H = H;
  g.dx = dx;
  g.dy = dx;
  g.n1 = checked_division(L, dx, "L");
  g.n2 = checked_division(H, dx, "H");
  return g;
}

void validate(const GridSpec& g) {
  if (g.n1 < 4 || g.n2 < 4) throw std::invalid_argument("grid needs at least 4x4 cells");
  if (std::abs(g.n1 * g.dx - g.L) > 1e-12 * std::max(1.0, g.L) ||
      std::abs(g.n2 * g.dy - g.H) > 1e-12 * std::max(1.0, g.H)) {
    throw std::invalid_argument("grid extents do not match cell counts");
  }
  if (g.dx != g.dy) throw std::invalid_argument("grid cells must be square");
}

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.cell_count(), fill) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double bilinear_sample(const ScalarField& f, double x1, double x2) {
  const GridSpec& g = f.grid();
  // Continuous index space where cell centers sit at integers.
  const double s = std::clamp(x1 / g.dx - 0.5, 0.0, static_cast<double>(g.n1 - 1));
  const double r = std::clamp(x2 / g.dy - 0.5, 0.0, static_cast<double>(g.n2 - 1));
  const int i0 = std::min(static_cast<int>(s), std::max(g.n1 - 2, 0));
  const int j0 = std::min(static_cast<int>(r), std::max(g.n2 - 2, 0));
  const int i1 = std::min(i0 + 1, g.n1 - 1);
  const int j1 = std::min(j0 + 1, g.n2 - 1);
  const double a = s - i0;
  const double b = r - j0;
  return (1 - a) * (1 - b) * f(i0, j0) + a * (1 - b) * f(i1, j0) + (1 - a) * b * f(i0, j1) +
         a * b * f(i1, j1);
}

GradientField gradient(const ScalarField& f) {
  const GridSpec& g = f.grid();
  GradientField out{ScalarField(g), ScalarField(g)};
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      out.d1(i, j) = line_derivative([&](int k) { return f(k, j); }, i, g.n1, g.dx);
      out.d2(i, j) = line_derivative([&](int k) { return f(i, k); }, j, g.n2, g.dy);
    }
  }
  return out;
}

ScalarField gradient_squared(const ScalarField& f) {
  const GradientField grad = gradient(f);
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = grad.d1[k] * grad.d1[k] + grad.d2[k] * grad.d2[k];
  }
  return out;
}

}  // namespace crackfield
