#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "crackfield/elasticity.hpp"
#include "crackfield/grid.hpp"
#include "crackfield/linear_solver.hpp"
#include "crackfield/model.hpp"
#include "crackfield/toughness.hpp"

namespace crackfield {

/// Right-hand side of the crack-field equation before the plus operator.
using RhsField = ScalarField;

/// Pre-plus right-hand side given |grad u|^2 per cell:
///   AT2: eps div(gamma grad z) - (gamma/eps) z + mu |grad u|^2 (1-z)
///   AT1: (3/4) eps div(gamma grad z) - (3/8) gamma/eps + mu |grad u|^2 (1-z)
/// div(gamma grad z) uses arithmetic-mean face toughness and zero flux on all sides.
RhsField rhs_pre_plus(const ScalarField& z, const ScalarField& grad_u_sq,
                      const ToughnessField& gamma, const ModelParams& p);

/// |grad u|^2 driving the crack field, from the flux-consistent gradient of
/// the displacement solved on `z_stiffness`.
ScalarField crack_drive(const ScalarField& u, const ScalarField& z_stiffness, double eta,
                        const BoundaryValues& boundary);

/// How |grad u|^2 in the crack drive is evaluated.
enum class DriveGradient {
  Flux,      ///< flux_gradient (default)
  Centered,  ///< centered differences of u
};

/// How the crack update enforces z' >= z.
enum class CrackProjection {
  /// Solves the complementarity problem of the implicit plus operator:
  /// z' >= z, driving force <= 0 where z' = z, equation exact elsewhere.
  ActiveSet,
  /// Solves the unconstrained system, then z' = max(z, z*).
  Max,
};

std::string_view to_string(CrackProjection projection);
CrackProjection parse_projection(std::string_view text);

struct StepOptions {
  DriveGradient drive = DriveGradient::Flux;
  CrackProjection projection = CrackProjection::ActiveSet;
  SolverOptions elastic{1e-8, 0};
  SolverOptions crack{1e-12, 0};
  double tip_threshold = 0.5;
  /// Maximum number of u/z passes per step; 1 is the plain staggered scheme.
  int stagger_max = 1;
  /// Passes stop once max |z_k+1 - z_k| falls below this.
  double stagger_tol = 1e-4;
};

struct StepDiagnostics {
  int elastic_iterations = 0;
  double elastic_residual = 0.0;
  int crack_iterations = 0;
  double crack_residual = 0.0;
  int active_cells = 0;
  int stagger_passes = 0;
  double stagger_change = 0.0;
  int projection_rounds = 0;
};

/// Semi-implicit crack-field update with a frozen drive: solves
///   alpha2 (z* - z)/dt = L z* + mu G (1 - z*) + S
/// where L holds the diffusion (and for AT2 the -gamma z/eps term) and S is the
/// AT1 constant -3 gamma/(8 eps), subject to z' >= z (see CrackProjection);
/// the result is clamped to [0, 1].
ScalarField update_crack(const ScalarField& z, const ScalarField& grad_u_sq,
                         const ToughnessField& gamma, const ModelParams& p,
                         const SolverOptions& solver,
                         CrackProjection projection = CrackProjection::ActiveSet,
                         StepDiagnostics* diag = nullptr);

/// One time step: elastic solve at t + dt on the current z, then the crack
/// update. With stagger_max > 1 the elastic solve is repeated on the updated z
/// and the crack update redone from the old z until the passes agree.
SimState step(const SimState& state, const ToughnessField& gamma, const ModelParams& p,
              const SurfingBC& bc, const StepOptions& opts = {}, StepDiagnostics* diag = nullptr);

/// Rightmost cell column with z >= threshold; x2 is the z-weighted centroid of
/// one contiguous run of above-threshold cells in that column. When the crack
/// has branched the heaviest run wins, ties going to the lower one. Throws
/// NoCrack.
TipPosition track_tip(const ScalarField& z, double threshold = 0.5);

/// One-dimensional optimal crack profile at distance `dist` from the crack:
/// exp(-d/eps) (AT2), max(0, 1 - d/(2 eps))^2 (AT1).
double notch_profile(Variant variant, double epsilon, double dist);

/// Notch around {(s, H/2) : 0 <= s <= notch_length} thickened to a band of
/// half-width `half_width` (default dy/2), so the two rows adjacent to the
/// midline start fully cracked; z0 = notch_profile(distance to the band).
ScalarField initial_crack(const GridSpec& grid, const ModelParams& p, double notch_length,
                          std::optional<double> half_width = std::nullopt);

/// Discrete total energy whose gradient flow the crack update follows when
/// the drive is frozen (elastic part written with the per-cell drive).
double discrete_energy(const ScalarField& z, const ScalarField& grad_u_sq,
                       const ToughnessField& gamma, const ModelParams& p);

struct TipSample {
  int step = 0;
  double t = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

struct Trajectory {
  GridSpec grid;
  ModelParams params;
  ToughnessScenario scenario;
  SurfingBC bc;
  double notch_length = 0.25;
  int record_every = 1;
  std::vector<SimState> snapshots;  ///< step 0 plus every record_every-th step
  std::vector<TipSample> tip_series;  ///< every step

  /// Snapshot recorded at `step`, or nullptr.
  const SimState* at_step(int step) const;
  const TipSample* tip_at_step(int step) const;
};

struct SimulationConfig {
  GridSpec grid;
  ToughnessScenario scenario;
  ModelParams params;
  SurfingBC bc;
  int n_steps = 200;
  double notch_length = 0.25;
  int record_every = 1;
  StepOptions step;
  /// Amplitude of a seeded uniform perturbation in [0, notch_noise) added to
  /// the initial crack field (then clamped). 0 keeps the notch exactly symmetric.
  double notch_noise = 0.0;
  std::uint64_t noise_seed = 0;
};

using StepObserver = std::function<void(const SimState&, const StepDiagnostics&)>;

/// Runs n_steps from the initial notch. NoConvergence is rethrown with the step index.
Trajectory run_simulation(const SimulationConfig& cfg, const StepObserver& observer = {});

}  // namespace crackfield
