#include "crackfield/chebyshev.hpp"

#include <map>
#include <mutex>
#include <utility>

#include <Eigen/Dense>

#include "crackfield/errors.hpp"

namespace crackfield {

ChebBasis chebyshev_basis(int degree, double s) {
  ChebBasis b;
  const std::size_t n = static_cast<std::size_t>(degree) + 1;
  b.t.assign(n, 0.0);
  b.dt.assign(n, 0.0);
  b.d2t.assign(n, 0.0);
  b.t[0] = 1.0;
  if (degree >= 1) {
    b.t[1] = s;
    b.dt[1] = 1.0;
  }
  // T_{k+1} = 2 s T_k - T_{k-1}, differentiated twice.
  for (std::size_t k = 1; k + 1 < n; ++k) {
    b.t[k + 1] = 2.0 * s * b.t[k] - b.t[k - 1];
    b.dt[k + 1] = 2.0 * b.t[k] + 2.0 * s * b.dt[k] - b.dt[k - 1];
    b.d2t[k + 1] = 4.0 * b.dt[k] + 2.0 * s * b.d2t[k] - b.d2t[k - 1];
  }
  return b;
}

PolyFit::PolyFit(std::array<ChebAxis, 3> axes, std::vector<double> coeffs)
    : axes_(axes), coeffs_(std::move(coeffs)) {}

double PolyFit::derivative(double x1, double x2, double t, int o1, int o2, int ot) const {
  const std::array<double, 3> x{x1, x2, t};
  const std::array<int, 3> order{o1, o2, ot};
  std::array<std::vector<double>, 3> w;
  for (int a = 0; a < 3; ++a) {
    const ChebBasis b = chebyshev_basis(axes_[a].degree, axes_[a].to_unit(x[a]));
    const double sc = axes_[a].scale();
    switch (order[a]) {
      case 0: w[a] = b.t; break;
      case 1:
        w[a] = b.dt;
        for (double& v : w[a]) v *= sc;
        break;
      case 2:
        w[a] = b.d2t;
        for (double& v : w[a]) v *= sc * sc;
        break;
      default: throw std::invalid_argument("derivative order must be 0, 1 or 2");
    }
  }
  const std::size_t n1 = w[0].size(), n2 = w[1].size(), n3 = w[2].size();
  double acc = 0.0;
  for (std::size_t a = 0; a < n1; ++a) {
    double acc2 = 0.0;
    for (std::size_t b = 0; b < n2; ++b) {
      const double* c = &coeffs_[(a * n2 + b) * n3];
      double acc3 = 0.0;
      for (std::size_t k = 0; k < n3; ++k) acc3 += c[k] * w[2][k];
      acc2 += acc3 * w[1][b];
    }
    acc += acc2 * w[0][a];
  }
  return acc;
}

namespace {

// Pseudo-inverse of the Vandermonde matrix of equispaced nodes on [-1, 1];
// it depends only on (nodes, degree), so it is cached.
const Eigen::MatrixXd& unit_pinv(int nodes, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, Eigen::MatrixXd> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({nodes, degree});
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd V(nodes, degree + 1);
  for (int m = 0; m < nodes; ++m) {
    const double s = nodes == 1 ? 0.0 : -1.0 + 2.0 * m / (nodes - 1);
    const ChebBasis b = chebyshev_basis(degree, s);
    for (int k = 0; k <= degree; ++k) V(m, k) = b.t[k];
  }
  Eigen::MatrixXd pinv = V.completeOrthogonalDecomposition().pseudoInverse();
  return cache.emplace(std::make_pair(nodes, degree), std::move(pinv)).first->second;
}

}  // namespace

PolyFit fit_tensor(const std::array<ChebAxis, 3>& axes, const std::array<int, 3>& counts,
                   const std::vector<double>& values) {
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < axes[a].degree + 1) {
      throw RankDeficient("axis " + std::to_string(a) + " has " + std::to_string(counts[a]) +
                          " nodes for degree " + std::to_string(axes[a].degree));
    }
    if (!(axes[a].hi > axes[a].lo)) throw RankDeficient("empty fit interval");
  }
  const std::size_t total = static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  if (values.size() != total) throw std::invalid_argument("value count does not match the grid");

  const Eigen::MatrixXd& P1 = unit_pinv(counts[0], axes[0].degree);
  const Eigen::MatrixXd& P2 = unit_pinv(counts[1], axes[1].degree);
  const Eigen::MatrixXd& P3 = unit_pinv(counts[2], axes[2].degree);
  const int m1 = counts[0], m2 = counts[1], m3 = counts[2];
  const int d1 = axes[0].degree + 1, d2 = axes[1].degree + 1, d3 = axes[2].degree + 1;

  // Contract axis 3, then 2, then 1.
  std::vector<double> s3(static_cast<std::size_t>(m1) * m2 * d3, 0.0);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j)
      for (int c = 0; c < d3; ++c) {
        double acc = 0.0;
        for (int k = 0; k < m3; ++k) acc += P3(c, k) * values[(i * m2 + j) * m3 + k];
        s3[(i * m2 + j) * d3 + c] = acc;
      }
  std::vector<double> s2(static_cast<std::size_t>(m1) * d2 * d3, 0.0);
  for (int i = 0; i < m1; ++i)
    for (int b = 0; b < d2; ++b)
      for (int c = 0; c < d3; ++c) {
        double acc = 0.0;
        for (int j = 0; j < m2; ++j) acc += P2(b, j) * s3[(i * m2 + j) * d3 + c];
        s2[(i * d2 + b) * d3 + c] = acc;
      }
  std::vector<double> coeffs(static_cast<std::size_t>(d1) * d2 * d3, 0.0);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d2; ++b)
      for (int c = 0; c < d3; ++c) {
        double acc = 0.0;
        for (int i = 0; i < m1; ++i) acc += P1(a, i) * s2[(i * d2 + b) * d3 + c];
        coeffs[(a * d2 + b) * d3 + c] = acc;
      }
  return PolyFit(axes, std::move(coeffs));
}

}  // namespace crackfield
