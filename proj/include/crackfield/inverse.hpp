#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "crackfield/chebyshev.hpp"
#include "crackfield/model.hpp"
#include "crackfield/phase_field.hpp"

namespace crackfield {

struct SpaceTimePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;
  int step = 0;
};

/// For each step n in [n0, n1): nx1 x nx2 equispaced points on
/// [tip_x1(n), L] x [0, H] snapped to cell centers, duplicates within a step
/// dropped. Throws EmptyWindow when the tip has reached L.
std::vector<SpaceTimePoint> sample_uncracked(const Trajectory& traj, int n0, int n1, int nx1,
                                             int nx2);

/// The 2x2 block of cell centers spanning [tip_x1, tip_x1 + dx] x
/// [tip_x2, tip_x2 + dy] for each step in [n0, n1). Throws TipOutOfDomain when
/// the block leaves the grid.
std::vector<SpaceTimePoint> sample_near_tip(const Trajectory& traj, int n0, int n1);

/// Cells in x1, cells in x2, recorded snapshots in t.
struct FitWindow {
  int cells_x1 = 9;
  int cells_x2 = 9;
  int steps = 9;
};

enum class FitTarget { Z, U };

/// Local least-squares Chebyshev fit of z or u on a space-time window
/// centered at the cell and snapshot nearest to p, shifted inward at the
/// domain edges. A window smaller than degree + 1 on some axis is enlarged
/// once; if the data still cannot support it, RankDeficient is thrown.
PolyFit fit_local_poly(const Trajectory& traj, FitTarget target, const SpaceTimePoint& p,
                       int degree = 7, FitWindow window = {});

struct SamplePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;
  double Zt = 0.0;
  double Zx1 = 0.0;
  double Zx2 = 0.0;
  double Zlap = 0.0;
  double Z = 0.0;
  double GradU2 = 0.0;
};

/// Fits z and u around p and evaluates the fitted derivatives at p.
SamplePoint interpolate_sample(const Trajectory& traj, const SpaceTimePoint& p, int degree = 7,
                               FitWindow window = {});

struct XYPoint {
  double X = 0.0;
  double Y = 0.0;
  double X1 = 0.0;  ///< eps dZ/dx1, diagnostic only
  double X2 = 0.0;  ///< eps dZ/dx2, diagnostic only
  SamplePoint origin;
  std::optional<int> class_label;
};

/// Y = alpha2 Zt - mu GradU2 (1 - Z); X = eps Zlap - Z/eps (AT2) or
/// 0.75 eps Zlap - 3/(8 eps) (AT1).
std::vector<XYPoint> build_xy(const std::vector<SamplePoint>& samples, const ModelParams& p);

/// sum(XY) / sum(X^2). Throws Degenerate when sum(X^2) is zero.
double regress_origin(const std::vector<XYPoint>& points);

struct EstimationReport {
  int k = 0;
  std::vector<double> gamma_hat;  ///< ascending
  std::vector<int> assignments;
  /// Per class, (x1, x2) of the member points.
  std::vector<std::vector<std::array<double, 2>>> spatial_map;
  std::vector<std::size_t> class_sizes;
  /// Intercept and slope of an ordinary least-squares line per class; audit only.
  std::vector<std::array<double, 2>> intercept_fit;
  int iterations = 0;
  int restarts_used = 0;
  double total_distance = 0.0;
  std::vector<XYPoint> points;  ///< with class_label set
};

struct KMeansOptions {
  int max_iter = 100;
  int restarts = 10;
  double tolerance = 1e-10;
  /// Points with |X| at or below this fraction of max|X| carry no slope.
  double x_floor_rel = 1e-6;
};

/// Slope clustering with dist_m = (Y - gamma_m X)^2 and per-class
/// through-origin updates; the best of the restarts by total distance wins.
/// k = 1 reduces to regress_origin. Throws Degenerate when fewer than k
/// points have |X| above the floor.
EstimationReport slope_kmeans(const std::vector<XYPoint>& points, int k, std::uint64_t seed,
                              const KMeansOptions& opts = {});

enum class SamplingRoute { Uncracked, NearTip };

struct EstimationConfig {
  Variant variant = Variant::AT2;
  /// Defaults to Uncracked for AT2 and NearTip for AT1.
  std::optional<SamplingRoute> route;
  int n0 = 100;
  int n1 = 200;
  int nx1 = 20;
  int nx2 = 20;
  int k = 1;
  std::uint64_t seed = 0;
  int degree = 7;
  FitWindow window;
  KMeansOptions kmeans;

  SamplingRoute effective_route() const;
};

/// Sampling, local fits, (X, Y) construction and slope estimation. Throws
/// ValidationError("variant") when cfg and trajectory disagree.
EstimationReport estimate(const Trajectory& traj, const EstimationConfig& cfg);

}  // namespace crackfield
