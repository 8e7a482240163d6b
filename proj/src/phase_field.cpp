#include "crackfield/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "crackfield/errors.hpp"

namespace crackfield {

namespace {

struct CrackCoefficients {
  double diffusion;  // multiplies div(gamma grad z)
  double reaction;   // multiplies gamma/eps * z (AT2 only)
  double source;     // multiplies gamma/eps (AT1 only)
};

CrackCoefficients coefficients(const ModelParams& p) {
  if (p.variant == Variant::AT2) return {p.epsilon, 1.0, 0.0};
  return {0.75 * p.epsilon, 0.0, -0.375};
}

double face_gamma(double a, double b) { return 0.5 * (a + b); }

// div(gamma grad z) at cell (i, j), zero flux through the domain boundary.
double diffusion_at(const ScalarField& z, const ToughnessField& gamma, int i, int j) {
  const GridSpec& g = z.grid();
  const std::size_t k = g.index(i, j);
  const double inv_h2 = 1.0 / (g.dx * g.dx);
  const double w = i > 0 ? face_gamma(gamma[k], gamma[k - 1]) * (z[k - 1] - z[k]) : 0.0;
  const double e = i + 1 < g.n1 ? face_gamma(gamma[k], gamma[k + 1]) * (z[k + 1] - z[k]) : 0.0;
  const double s = j > 0 ? face_gamma(gamma[k], gamma[k - g.n1]) * (z[k - g.n1] - z[k]) : 0.0;
  const double n = j + 1 < g.n2 ? face_gamma(gamma[k], gamma[k + g.n1]) * (z[k + g.n1] - z[k]) : 0.0;
  return ((w + e) + (s + n)) * inv_h2;
}

}  // namespace

RhsField rhs_pre_plus(const ScalarField& z, const ScalarField& grad_u_sq,
                      const ToughnessField& gamma, const ModelParams& p) {
  const GridSpec& g = z.grid();
  const CrackCoefficients c = coefficients(p);
  RhsField out(g);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const double ge = gamma[k] / p.epsilon;
      out[k] = c.diffusion * diffusion_at(z, gamma, i, j) - c.reaction * ge * z[k] + c.source * ge +
               p.mu * grad_u_sq[k] * (1.0 - z[k]);
    }
  }
  return out;
}

ScalarField crack_drive(const ScalarField& u, const ScalarField& z_stiffness, double eta,
                        const BoundaryValues& boundary) {
  const GradientField grad = flux_gradient(u, z_stiffness, eta, boundary);
  ScalarField out(u.grid());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = grad.d1[k] * grad.d1[k] + grad.d2[k] * grad.d2[k];
  }
  return out;
}

namespace {

// Primal-dual active set for: z' >= z, A z' - b >= 0, complementary. Cells in
// `fixed` are held at z; their couplings move to the right-hand side.
SolveResult solve_active_set(const Stencil5& A, const std::vector<double>& b, const ScalarField& z,
                             ScalarField& out, const SolverOptions& solver, int& rounds) {
  const GridSpec& g = z.grid();
  const std::size_t n = g.cell_count();
  const int n1 = g.n1;
  std::vector<char> fixed(n, 0);
  std::vector<double> Az(n);
  const double b_max = std::abs(*std::max_element(b.begin(), b.end(), [](double x, double y) {
    return std::abs(x) < std::abs(y);
  }));
  const double threshold = 10.0 * solver.tol * std::max(b_max, 1e-300);
  SolveResult total;
  for (rounds = 1; rounds <= 100; ++rounds) {
    Stencil5 B(g);
    std::vector<double> rhs(n);
    for (int j = 0; j < g.n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        const std::size_t k = g.index(i, j);
        B.diag[k] = A.diag[k];
        if (fixed[k]) {
          rhs[k] = A.diag[k] * z[k];
          out[k] = z[k];
          continue;
        }
        if (i + 1 < n1 && !fixed[k + 1]) B.east[k] = A.east[k];
        if (j + 1 < g.n2 && !fixed[k + n1]) B.north[k] = A.north[k];
        const double w = i > 0 && fixed[k - 1] ? A.east[k - 1] * z[k - 1] : 0.0;
        const double e = i + 1 < n1 && fixed[k + 1] ? A.east[k] * z[k + 1] : 0.0;
        const double s = j > 0 && fixed[k - n1] ? A.north[k - n1] * z[k - n1] : 0.0;
        const double nn = j + 1 < g.n2 && fixed[k + n1] ? A.north[k] * z[k + n1] : 0.0;
        rhs[k] = b[k] + ((w + e) + (s + nn));
      }
    }
    const SolveResult r = solve_pcg(B, rhs, out.values(), solver);
    total.iterations += r.iterations;
    total.residual = r.residual;
    total.converged = r.converged;
    if (!r.converged) return total;

    A.apply(out.values(), Az);
    bool changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!fixed[k] && out[k] < z[k]) {
        fixed[k] = 1;
        changed = true;
      } else if (fixed[k] && Az[k] - b[k] < -threshold) {
        fixed[k] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return total;
}

}  // namespace

std::string_view to_string(CrackProjection projection) {
  return projection == CrackProjection::ActiveSet ? "active_set" : "max";
}

CrackProjection parse_projection(std::string_view text) {
  if (text == "active_set") return CrackProjection::ActiveSet;
  if (text == "max") return CrackProjection::Max;
  throw std::invalid_argument("unknown crack projection: " + std::string(text));
}

ScalarField update_crack(const ScalarField& z, const ScalarField& grad_u_sq,
                         const ToughnessField& gamma, const ModelParams& p,
                         const SolverOptions& solver, CrackProjection projection,
                         StepDiagnostics* diag) {
  const GridSpec& g = z.grid();
  const CrackCoefficients c = coefficients(p);
  const double relax = p.alpha2 / p.dt;
  const double inv_h2 = 1.0 / (g.dx * g.dx);

  Stencil5 A(g);
  std::vector<double> b(g.cell_count());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const double ge = gamma[k] / p.epsilon;
      const double drive = p.mu * grad_u_sq[k];
      A.diag[k] = relax + c.reaction * ge + drive;
      b[k] = relax * z[k] + drive + c.source * ge;
      if (i + 1 < g.n1) A.east[k] = c.diffusion * face_gamma(gamma[k], gamma[k + 1]) * inv_h2;
      if (j + 1 < g.n2) A.north[k] = c.diffusion * face_gamma(gamma[k], gamma[k + g.n1]) * inv_h2;
    }
  }
  A.add_face_sums();

  ScalarField candidate = z;
  int rounds = 1;
  const SolveResult r = projection == CrackProjection::ActiveSet
                            ? solve_active_set(A, b, z, candidate, solver, rounds)
                            : solve_pcg(A, b, candidate.values(), solver);
  if (!r.converged) throw NoConvergence("crack-field solve", r.iterations, r.residual);

  ScalarField next(g);
  int active = 0;
  for (std::size_t k = 0; k < next.size(); ++k) {
    double v = std::max(z[k], candidate[k]);
    if (p.z_clamp) v = std::clamp(v, 0.0, 1.0);
    if (v > z[k]) ++active;
    next[k] = v;
  }
  if (diag) {
    diag->crack_iterations = r.iterations;
    diag->crack_residual = r.residual;
    diag->active_cells = active;
    diag->projection_rounds = rounds;
  }
  return next;
}

SimState step(const SimState& state, const ToughnessField& gamma, const ModelParams& p,
              const SurfingBC& bc, const StepOptions& opts, StepDiagnostics* diag) {
  const double t_next = state.t + p.dt;
  const BoundaryValues boundary = surfing_boundary(state.z.grid(), bc, t_next);
  StepDiagnostics local;

  ScalarField z_stiff = state.z;
  ScalarField u = state.u;
  ScalarField z_next;
  const int passes = std::max(1, opts.stagger_max);
  for (int pass = 1; pass <= passes; ++pass) {
    ElasticProblem problem{z_stiff.grid(), z_stiff, boundary, p.eta, opts.elastic};
    ElasticSolution elastic = solve_displacement(problem, u);
    const ScalarField drive = opts.drive == DriveGradient::Flux
                                  ? crack_drive(elastic.u, z_stiff, p.eta, boundary)
                                  : gradient_squared(elastic.u);
    local.elastic_iterations += elastic.iterations;
    local.elastic_residual = elastic.residual;
    u = std::move(elastic.u);
    StepDiagnostics crack;
    z_next = update_crack(state.z, drive, gamma, p, opts.crack, opts.projection, &crack);
    local.crack_iterations += crack.crack_iterations;
    local.crack_residual = crack.crack_residual;
    local.active_cells = crack.active_cells;
    local.projection_rounds += crack.projection_rounds;
    local.stagger_passes = pass;

    double change = 0.0;
    for (std::size_t k = 0; k < z_next.size(); ++k) {
      change = std::max(change, std::abs(z_next[k] - z_stiff[k]));
    }
    local.stagger_change = change;
    if (pass > 1 && change < opts.stagger_tol) break;
    if (pass < passes) z_stiff = z_next;
  }

  SimState next;
  next.step = state.step + 1;
  next.t = t_next;
  next.z = std::move(z_next);
  next.u = std::move(u);
  try {
    next.tip = track_tip(next.z, opts.tip_threshold);
  } catch (const NoCrack&) {
    next.tip = state.tip;
  }
  if (diag) *diag = local;
  return next;
}

TipPosition track_tip(const ScalarField& z, double threshold) {
  const GridSpec& g = z.grid();
  for (int i = g.n1 - 1; i >= 0; --i) {
    double best_weight = 0.0, best_moment = 0.0;
    double weight = 0.0, moment = 0.0;
    for (int j = 0; j <= g.n2; ++j) {
      const double v = j < g.n2 ? z(i, j) : 0.0;
      if (v >= threshold) {
        weight += v;
        moment += v * g.x2(j);
        continue;
      }
      if (weight > best_weight) {
        best_weight = weight;
        best_moment = moment;
      }
      weight = moment = 0.0;
    }
    if (best_weight > 0.0) return {g.x1(i), best_moment / best_weight};
  }
  throw NoCrack("no cell reaches the tip threshold " + std::to_string(threshold));
}

double notch_profile(Variant variant, double epsilon, double dist) {
  if (variant == Variant::AT2) return std::exp(-dist / epsilon);
  const double s = std::max(0.0, 1.0 - dist / (2.0 * epsilon));
  return s * s;
}

ScalarField initial_crack(const GridSpec& grid, const ModelParams& p, double notch_length,
                          std::optional<double> half_width) {
  if (!(notch_length > 0.0) || !(notch_length < grid.L)) {
    throw std::invalid_argument("notch length must lie in (0, L)");
  }
  const double w = half_width.value_or(0.5 * grid.dy);
  if (!(w >= 0.0)) throw std::invalid_argument("notch half-width must be non-negative");
  ScalarField z(grid);
  for (int j = 0; j < grid.n2; ++j) {
    // Distance to the midline from the row index, so rows j and n2-1-j agree exactly.
    const double off = 0.5 * std::abs(2 * j + 1 - grid.n2) * grid.dy;
    for (int i = 0; i < grid.n1; ++i) {
      const double x = grid.x1(i);
      const double along = std::clamp(x, 0.0, notch_length);
      const double across = std::max(0.0, off - w);
      const double dist = std::hypot(x - along, across);
      z(i, j) = std::clamp(notch_profile(p.variant, p.epsilon, dist), 0.0, 1.0);
    }
  }
  return z;
}

double discrete_energy(const ScalarField& z, const ScalarField& grad_u_sq,
                       const ToughnessField& gamma, const ModelParams& p) {
  const GridSpec& g = z.grid();
  const CrackCoefficients c = coefficients(p);
  const double area = g.dx * g.dy;
  double bulk = 0.0;
  double faces = 0.0;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const double ge = gamma[k] / p.epsilon;
      bulk += 0.5 * p.mu * (1.0 - z[k]) * (1.0 - z[k]) * grad_u_sq[k];
      bulk += p.variant == Variant::AT2 ? 0.5 * ge * z[k] * z[k] : 0.375 * ge * z[k];
      if (i + 1 < g.n1) {
        const double dz = (z[k + 1] - z[k]) / g.dx;
        faces += 0.5 * c.diffusion * face_gamma(gamma[k], gamma[k + 1]) * dz * dz;
      }
      if (j + 1 < g.n2) {
        const double dz = (z[k + g.n1] - z[k]) / g.dy;
        faces += 0.5 * c.diffusion * face_gamma(gamma[k], gamma[k + g.n1]) * dz * dz;
      }
    }
  }
  return (bulk + faces) * area;
}

const SimState* Trajectory::at_step(int step) const {
  if (snapshots.empty() || step < 0) return nullptr;
  if (record_every == 1 && step < static_cast<int>(snapshots.size()) &&
      snapshots[step].step == step) {
    return &snapshots[step];
  }
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), step,
                             [](const SimState& s, int n) { return s.step < n; });
  return it != snapshots.end() && it->step == step ? &*it : nullptr;
}

const TipSample* Trajectory::tip_at_step(int step) const {
  auto it = std::lower_bound(tip_series.begin(), tip_series.end(), step,
                             [](const TipSample& s, int n) { return s.step < n; });
  return it != tip_series.end() && it->step == step ? &*it : nullptr;
}

Trajectory run_simulation(const SimulationConfig& cfg, const StepObserver& observer) {
  validate(cfg.grid);
  cfg.params.validate();
  cfg.bc.validate();
  cfg.scenario.validate();
  if (cfg.n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(cfg.notch_noise >= 0.0)) throw std::invalid_argument("notch_noise must be non-negative");

  Trajectory traj;
  traj.grid = cfg.grid;
  traj.params = cfg.params;
  traj.scenario = cfg.scenario;
  traj.bc = cfg.bc;
  traj.notch_length = cfg.notch_length;
  traj.record_every = cfg.record_every;

  const ToughnessField gamma = rasterize(cfg.scenario, cfg.grid);

  SimState state;
  state.step = 0;
  state.t = 0.0;
  state.z = initial_crack(cfg.grid, cfg.params, cfg.notch_length);
  if (cfg.notch_noise > 0.0) {
    std::mt19937_64 rng(cfg.noise_seed);
    std::uniform_real_distribution<double> U(0.0, cfg.notch_noise);
    for (double& v : state.z.values()) v = std::min(1.0, v + U(rng));
  }
  StepDiagnostics diag;
  {
    const ElasticProblem problem =
        make_elastic_problem(state.z, cfg.bc, 0.0, cfg.params.eta, cfg.step.elastic);
    ElasticSolution sol = solve_displacement(problem, ScalarField(cfg.grid));
    state.u = std::move(sol.u);
    diag.elastic_iterations = sol.iterations;
    diag.elastic_residual = sol.residual;
  }
  state.tip = track_tip(state.z, cfg.step.tip_threshold);
  traj.tip_series.push_back({0, 0.0, state.tip.x1, state.tip.x2});
  traj.snapshots.push_back(state);
  if (observer) observer(state, diag);

  for (int n = 1; n <= cfg.n_steps; ++n) {
    try {
      state = step(state, gamma, cfg.params, cfg.bc, cfg.step, &diag);
    } catch (const NoConvergence& e) {
      throw NoConvergence("step " + std::to_string(n) + ": " + e.what(), e.iterations(),
                          e.residual());
    }
    // Recompute the time from the step index so long runs do not accumulate drift.
    state.t = n * cfg.params.dt;
    traj.tip_series.push_back({n, state.t, state.tip.x1, state.tip.x2});
    if (n % cfg.record_every == 0) traj.snapshots.push_back(state);
    if (observer) observer(state, diag);
  }
  return traj;
}

}  // namespace crackfield
