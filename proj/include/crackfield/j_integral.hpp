#pragma once

#include <optional>
#include <vector>

#include "crackfield/elasticity.hpp"
#include "crackfield/grid.hpp"
#include "crackfield/model.hpp"
#include "crackfield/phase_field.hpp"

namespace crackfield {

/// Rectangular counter-clockwise contour: Gamma1 is the vertical segment at
/// x1_left, Gamma2 the right side x1 = L, Gamma3/Gamma4 the top/bottom
/// boundaries restricted to x1 in [x1_left, L].
/// Integrand on Gamma1.
enum class Gamma1Form {
  /// mu (1-z)^2 ((du/dx1)^2 - (du/dx2)^2) / 2, i.e. -W + T du/dx1 with normal (-1, 0).
  Contour,
  /// -mu (1-z)^2 (du/dx2)^2.
  Quoted,
};

struct JContour {
  double x1_left = 0.49;
  bool uses_domain_boundary = true;
  Gamma1Form gamma1_form = Gamma1Form::Contour;

  /// x1_left must be an interior face coordinate of `g`.
  void validate(const GridSpec& g) const;
  int face_index(const GridSpec& g) const;
};

/// Shared inputs of the contour integrals. Gradients are rebuilt from FV
/// face fluxes (see flux_gradient), so `boundary` must be the Dirichlet data
/// at the state's time.
struct JField {
  const ScalarField& u;
  const ScalarField& z;
  const BoundaryValues& boundary;
  double mu = 1.0;
  double eta = 1e-6;
};

/// Integral over x2 along x1 = x1_left of the chosen Gamma1 integrand; the
/// integrand is the mean of the two cell columns sharing the face.
double j_gamma1(const JField& f, double x1_left, Gamma1Form form = Gamma1Form::Contour);

enum class Side { Bottom, Top };

/// int_{x1_left}^{L} mu (1-z)^2 (du/dx2)(du/dx1) dx1 along one boundary, x1
/// increasing; du/dx2 one-sided from the Dirichlet ghost value, du/dx1 the
/// tangential derivative of the Dirichlet data. x1_left may be 0.
double boundary_shear_integral(const JField& f, Side side, double x1_left);

/// Contribution of the top boundary with outward normal (0, 1) on the
/// counter-clockwise contour: -boundary_shear_integral(Top).
double j_gamma3(const JField& f, double x1_left);
/// Bottom boundary, outward normal (0, -1): +boundary_shear_integral(Bottom).
double j_gamma4(const JField& f, double x1_left);

/// int (W - mu (1-z)^2 (du/dx1)^2) dx2 on the right column, W from
/// strain_energy_density.
double j_gamma2(const JField& f);

struct JParts {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;
  double j4 = 0.0;
  double total = 0.0;
  bool j2_warning = false;  ///< |J2| > 0.01 |J|
};

JParts j_total(const SimState& state, const JContour& contour, const SurfingBC& bc,
               const ModelParams& p);

struct JSeries {
  std::vector<int> steps;
  std::vector<double> times;
  std::vector<double> j1, j2, j3, j4, total;
  std::vector<double> normalized;  ///< total / j_ref
  std::vector<double> tip_x1;
  double j_ref = 0.0;
  /// Entries [valid_begin, valid_end) have the tip clear of Gamma1 and no J2 warning.
  std::size_t valid_begin = 0;
  std::size_t valid_end = 0;

  std::size_t size() const { return times.size(); }
  /// Largest normalized value over the valid window; nullopt when empty.
  std::optional<double> peak() const;
};

struct JSeriesOptions {
  /// The tip must sit this far right of Gamma1 before an entry counts as valid.
  double tip_lead = 0.2;
  /// Step of the homogeneous reference value.
  int reference_step = 100;
};

/// J over every recorded snapshot, unnormalized (j_ref = 1).
JSeries j_series(const Trajectory& traj, const JContour& contour,
                 const JSeriesOptions& opts = {});

/// J of the reference trajectory at opts.reference_step. Throws MissingReference
/// when that step was not recorded.
double reference_j(const Trajectory& homogeneous, const JContour& contour,
                   const JSeriesOptions& opts = {});

/// j_series normalized by j_ref and truncated after the first J2 warning
/// that follows the start of the valid window. Throws MissingReference when
/// j_ref is absent or not positive.
JSeries normalized_series(const Trajectory& traj, const JContour& contour,
                          std::optional<double> j_ref, const JSeriesOptions& opts = {});

}  // namespace crackfield
