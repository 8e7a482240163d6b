#include "crackfield/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include "crackfield/errors.hpp"

namespace crackfield {

namespace {

void check_step_range(const Trajectory& traj, int n0, int n1) {
  if (n0 < 0 || n0 > n1) throw std::invalid_argument("step window must satisfy 0 <= n0 <= n1");
  if (n1 > static_cast<int>(traj.tip_series.size())) {
    throw std::invalid_argument("step window exceeds the recorded steps");
  }
}

const TipSample& tip_of(const Trajectory& traj, int n) {
  const TipSample* tip = traj.tip_at_step(n);
  if (!tip) throw std::invalid_argument("no tip recorded at step " + std::to_string(n));
  return *tip;
}

// Start of a run of `count` indices around `center`, shifted to fit in [0, size).
int window_start(int center, int count, int size) {
  int lo = center - (count - 1) / 2;
  lo = std::min(lo, size - count);
  return std::max(lo, 0);
}

}  // namespace

std::vector<SpaceTimePoint> sample_uncracked(const Trajectory& traj, int n0, int n1, int nx1,
                                             int nx2) {
  if (nx1 < 2 || nx2 < 2) throw std::invalid_argument("nx1 and nx2 must be at least 2");
  check_step_range(traj, n0, n1);
  const GridSpec& g = traj.grid;
  std::vector<SpaceTimePoint> out;
  for (int n = n0; n < n1; ++n) {
    const TipSample& tip = tip_of(traj, n);
    if (tip.x1 >= g.L) throw EmptyWindow("crack tip reached x1 = L at step " + std::to_string(n));
    std::set<std::pair<int, int>> seen;
    for (int a = 0; a < nx1; ++a) {
      const double x1 = tip.x1 + (g.L - tip.x1) * a / (nx1 - 1);
      for (int b = 0; b < nx2; ++b) {
        const double x2 = g.H * b / (nx2 - 1);
        const int i = g.nearest_i(x1);
        const int j = g.nearest_j(x2);
        if (!seen.insert({i, j}).second) continue;
        out.push_back({g.x1(i), g.x2(j), tip.t, n});
      }
    }
  }
  return out;
}

std::vector<SpaceTimePoint> sample_near_tip(const Trajectory& traj, int n0, int n1) {
  check_step_range(traj, n0, n1);
  const GridSpec& g = traj.grid;
  std::vector<SpaceTimePoint> out;
  for (int n = n0; n < n1; ++n) {
    const TipSample& tip = tip_of(traj, n);
    const int i0 = g.nearest_i(tip.x1);
    // Row whose center is the last at or below tip_x2, ties resolved downward.
    const int j0 = static_cast<int>(std::ceil(tip.x2 / g.dy - 1.0));
    if (i0 < 0 || i0 + 1 >= g.n1 || j0 < 0 || j0 + 1 >= g.n2) {
      throw TipOutOfDomain("near-tip block leaves the grid at step " + std::to_string(n));
    }
    for (int j = j0; j <= j0 + 1; ++j)
      for (int i = i0; i <= i0 + 1; ++i) out.push_back({g.x1(i), g.x2(j), tip.t, n});
  }
  return out;
}

PolyFit fit_local_poly(const Trajectory& traj, FitTarget target, const SpaceTimePoint& p,
                       int degree, FitWindow window) {
  if (degree < 0) throw std::invalid_argument("degree must be non-negative");
  const GridSpec& g = traj.grid;
  const int nsnap = static_cast<int>(traj.snapshots.size());
  if (nsnap == 0) throw RankDeficient("trajectory has no snapshots");

  std::array<int, 3> counts{window.cells_x1, window.cells_x2, window.steps};
  const std::array<int, 3> limits{g.n1, g.n2, nsnap};
  const int need = degree + 1;
  bool enlarged = false;
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < need) {
      counts[a] = need;
      enlarged = true;
    }
    if (counts[a] > limits[a]) {
      throw RankDeficient("window of " + std::to_string(counts[a]) + " exceeds the " +
                          std::to_string(limits[a]) + " samples available on axis " +
                          std::to_string(a) + (enlarged ? " after enlarging" : ""));
    }
  }

  const double rec_dt = traj.params.dt * traj.record_every;
  const int ic = g.nearest_i(p.x1);
  const int jc = g.nearest_j(p.x2);
  const int kc = std::clamp(static_cast<int>(std::lround(p.t / rec_dt)), 0, nsnap - 1);
  const int i0 = window_start(ic, counts[0], g.n1);
  const int j0 = window_start(jc, counts[1], g.n2);
  const int k0 = window_start(kc, counts[2], nsnap);

  std::vector<double> values(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]);
  for (int k = 0; k < counts[2]; ++k) {
    const SimState& s = traj.snapshots[k0 + k];
    const ScalarField& f = target == FitTarget::Z ? s.z : s.u;
    for (int i = 0; i < counts[0]; ++i)
      for (int j = 0; j < counts[1]; ++j)
        values[(static_cast<std::size_t>(i) * counts[1] + j) * counts[2] + k] = f(i0 + i, j0 + j);
  }
  const std::array<ChebAxis, 3> axes{
      ChebAxis{g.x1(i0), g.x1(i0 + counts[0] - 1), degree},
      ChebAxis{g.x2(j0), g.x2(j0 + counts[1] - 1), degree},
      ChebAxis{traj.snapshots[k0].t, traj.snapshots[k0 + counts[2] - 1].t, degree},
  };
  return fit_tensor(axes, counts, values);
}

SamplePoint interpolate_sample(const Trajectory& traj, const SpaceTimePoint& p, int degree,
                               FitWindow window) {
  const PolyFit z = fit_local_poly(traj, FitTarget::Z, p, degree, window);
  const PolyFit u = fit_local_poly(traj, FitTarget::U, p, degree, window);
  SamplePoint s;
  s.x1 = p.x1;
  s.x2 = p.x2;
  s.t = p.t;
  s.Z = z.value(p.x1, p.x2, p.t);
  s.Zt = z.d_t(p.x1, p.x2, p.t);
  s.Zx1 = z.d_x1(p.x1, p.x2, p.t);
  s.Zx2 = z.d_x2(p.x1, p.x2, p.t);
  s.Zlap = z.laplacian(p.x1, p.x2, p.t);
  const double u1 = u.d_x1(p.x1, p.x2, p.t);
  const double u2 = u.d_x2(p.x1, p.x2, p.t);
  s.GradU2 = u1 * u1 + u2 * u2;
  return s;
}

std::vector<XYPoint> build_xy(const std::vector<SamplePoint>& samples, const ModelParams& p) {
  std::vector<XYPoint> out;
  out.reserve(samples.size());
  const double eps = p.epsilon;
  for (const SamplePoint& s : samples) {
    XYPoint q;
    q.origin = s;
    q.Y = p.alpha2 * s.Zt - p.mu * s.GradU2 * (1.0 - s.Z);
    if (p.variant == Variant::AT2) {
      q.X = eps * s.Zlap - s.Z / eps;
    } else {
      q.X = 0.75 * eps * s.Zlap - 3.0 / (8.0 * eps);
    }
    q.X1 = eps * s.Zx1;
    q.X2 = eps * s.Zx2;
    out.push_back(q);
  }
  return out;
}

double regress_origin(const std::vector<XYPoint>& points) {
  double sxy = 0.0, sxx = 0.0;
  for (const XYPoint& q : points) {
    sxy += q.X * q.Y;
    sxx += q.X * q.X;
  }
  if (!(sxx > 0.0)) throw Degenerate("sum of X^2 is zero");
  return sxy / sxx;
}

namespace {

struct KMeansRun {
  std::vector<double> gamma;
  std::vector<int> labels;
  int iterations = 0;
  double total = 0.0;
};

double assign(const std::vector<XYPoint>& pts, const std::vector<double>& gamma,
              std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < gamma.size(); ++m) {
      const double r = pts[n].Y - gamma[m] * pts[n].X;
      const double d = r * r;
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(m);
      }
    }
    labels[n] = best;
    total += best_d;
  }
  return total;
}

std::array<double, 2> line_fit(const std::vector<XYPoint>& pts, const std::vector<int>& labels,
                               int m) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (labels[i] != m) continue;
    n += 1;
    sx += pts[i].X;
    sy += pts[i].Y;
    sxx += pts[i].X * pts[i].X;
    sxy += pts[i].X * pts[i].Y;
  }
  const double det = n * sxx - sx * sx;
  if (n < 2 || !(std::abs(det) > 0.0)) return {std::nan(""), std::nan("")};
  const double slope = (n * sxy - sx * sy) / det;
  return {(sy - slope * sx) / n, slope};
}

}  // namespace

EstimationReport slope_kmeans(const std::vector<XYPoint>& points, int k, std::uint64_t seed,
                              const KMeansOptions& opts) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  double xmax = 0.0;
  for (const XYPoint& q : points) xmax = std::max(xmax, std::abs(q.X));
  const double floor = opts.x_floor_rel * xmax;
  double smin = std::numeric_limits<double>::infinity();
  double smax = -smin;
  int sloped = 0;
  for (const XYPoint& q : points) {
    if (std::abs(q.X) <= floor) continue;
    const double s = q.Y / q.X;
    smin = std::min(smin, s);
    smax = std::max(smax, s);
    ++sloped;
  }
  if (sloped < k) {
    throw Degenerate(std::to_string(sloped) + " points with |X| above the floor, need " +
                     std::to_string(k));
  }

  KMeansRun best;
  int restarts_used = 0;
  if (k == 1) {
    best.gamma = {regress_origin(points)};
    best.labels.assign(points.size(), 0);
    best.total = assign(points, best.gamma, best.labels);
    best.iterations = 1;
    restarts_used = 1;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> draw(smin, smax);
    best.total = std::numeric_limits<double>::infinity();
    const int restarts = std::max(1, opts.restarts);
    for (int r = 0; r < restarts; ++r) {
      KMeansRun run;
      run.gamma.resize(k);
      for (double& g : run.gamma) g = draw(rng);
      run.labels.assign(points.size(), 0);
      for (int it = 1; it <= opts.max_iter; ++it) {
        assign(points, run.gamma, run.labels);
        std::vector<double> sxy(k, 0.0), sxx(k, 0.0);
        for (std::size_t n = 0; n < points.size(); ++n) {
          sxy[run.labels[n]] += points[n].X * points[n].Y;
          sxx[run.labels[n]] += points[n].X * points[n].X;
        }
        double change = 0.0;
        for (int m = 0; m < k; ++m) {
          const double next = sxx[m] > 0.0 ? sxy[m] / sxx[m] : draw(rng);
          change = std::max(change, std::abs(next - run.gamma[m]));
          run.gamma[m] = next;
        }
        run.iterations = it;
        if (change < opts.tolerance) break;
      }
      run.total = assign(points, run.gamma, run.labels);
      ++restarts_used;
      if (run.total < best.total) best = std::move(run);
    }
  }

  // Relabel so that gamma_hat ascends.
  std::vector<int> order(k);
  for (int m = 0; m < k; ++m) order[m] = m;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return best.gamma[a] < best.gamma[b]; });
  std::vector<int> rank(k);
  for (int m = 0; m < k; ++m) rank[order[m]] = m;

  EstimationReport rep;
  rep.k = k;
  rep.iterations = best.iterations;
  rep.restarts_used = restarts_used;
  rep.total_distance = best.total;
  for (int m = 0; m < k; ++m) rep.gamma_hat.push_back(best.gamma[order[m]]);
  rep.assignments.resize(points.size());
  rep.spatial_map.resize(k);
  rep.class_sizes.assign(k, 0);
  rep.points = points;
  for (std::size_t n = 0; n < points.size(); ++n) {
    const int c = rank[best.labels[n]];
    rep.assignments[n] = c;
    rep.points[n].class_label = c;
    rep.spatial_map[c].push_back({points[n].origin.x1, points[n].origin.x2});
    ++rep.class_sizes[c];
  }
  for (int m = 0; m < k; ++m) rep.intercept_fit.push_back(line_fit(points, rep.assignments, m));
  return rep;
}

SamplingRoute EstimationConfig::effective_route() const {
  if (route) return *route;
  return variant == Variant::AT1 ? SamplingRoute::NearTip : SamplingRoute::Uncracked;
}

EstimationReport estimate(const Trajectory& traj, const EstimationConfig& cfg) {
  if (traj.params.variant != cfg.variant) {
    throw ValidationError("variant", "estimation variant does not match the trajectory");
  }
  const std::vector<SpaceTimePoint> where =
      cfg.effective_route() == SamplingRoute::Uncracked
          ? sample_uncracked(traj, cfg.n0, cfg.n1, cfg.nx1, cfg.nx2)
          : sample_near_tip(traj, cfg.n0, cfg.n1);
  std::vector<SamplePoint> samples;
  samples.reserve(where.size());
  for (const SpaceTimePoint& p : where) {
    samples.push_back(interpolate_sample(traj, p, cfg.degree, cfg.window));
  }
  return slope_kmeans(build_xy(samples, traj.params), cfg.k, cfg.seed, cfg.kmeans);
}

}  // namespace crackfield
