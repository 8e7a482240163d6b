#include "crackfield/j_integral.hpp"

#include <algorithm>
#include <cmath>

#include "crackfield/errors.hpp"

namespace crackfield {

void JContour::validate(const GridSpec& g) const {
  if (!(x1_left > 0.0) || !(x1_left < g.L)) {
    throw ValidationError("x1_left", "must lie strictly inside (0, L)");
  }
  const double faces = x1_left / g.dx;
  if (std::abs(faces - std::round(faces)) > 1e-9 * std::max(1.0, faces)) {
    throw ValidationError("x1_left", "must be a face coordinate (multiple of dx)");
  }
}

int JContour::face_index(const GridSpec& g) const {
  validate(g);
  return static_cast<int>(std::lround(x1_left / g.dx));
}

double j_gamma1(const JField& f, double x1_left, Gamma1Form form) {
  const GridSpec& g = f.u.grid();
  const int face = JContour{x1_left, true, Gamma1Form::Contour}.face_index(g);
  const GradientField grad = flux_gradient(f.u, f.z, f.eta, f.boundary);
  double acc = 0.0;
  for (int j = 0; j < g.n2; ++j) {
    double sum = 0.0;
    for (int i : {face - 1, face}) {
      const std::size_t k = g.index(i, j);
      const double s = (1.0 - f.z[k]) * (1.0 - f.z[k]);
      const double d1 = grad.d1[k];
      const double d2 = grad.d2[k];
      sum += form == Gamma1Form::Contour ? 0.5 * s * (d1 * d1 - d2 * d2) : -s * d2 * d2;
    }
    acc += 0.5 * sum * g.dy;
  }
  return f.mu * acc;
}

double boundary_shear_integral(const JField& f, Side side, double x1_left) {
  const GridSpec& g = f.u.grid();
  // The left end may sit on the domain edge.
  const int face = x1_left == 0.0 ? 0 : JContour{x1_left, true, Gamma1Form::Contour}.face_index(g);
  const int j = side == Side::Top ? g.n2 - 1 : 0;
  const std::vector<double>& data = side == Side::Top ? f.boundary.top : f.boundary.bottom;
  double acc = 0.0;
  for (int i = face; i < g.n1; ++i) {
    const std::size_t k = g.index(i, j);
    const double du2 = side == Side::Top ? 2.0 * (data[i] - f.u[k]) / g.dy
                                         : 2.0 * (f.u[k] - data[i]) / g.dy;
    // Tangential derivative of the Dirichlet data.
    const int lo = std::max(i - 1, 0);
    const int hi = std::min(i + 1, g.n1 - 1);
    const double du1 = (data[hi] - data[lo]) / ((hi - lo) * g.dx);
    const double s = (1.0 - f.z[k]) * (1.0 - f.z[k]);
    acc += s * du2 * du1 * g.dx;
  }
  return f.mu * acc;
}

double j_gamma3(const JField& f, double x1_left) {
  return -boundary_shear_integral(f, Side::Top, x1_left);
}

double j_gamma4(const JField& f, double x1_left) {
  return boundary_shear_integral(f, Side::Bottom, x1_left);
}

double j_gamma2(const JField& f) {
  const GridSpec& g = f.u.grid();
  const ScalarField w = strain_energy_density(f.u, f.z, f.mu);
  const GradientField grad = gradient(f.u);
  const int i = g.n1 - 1;
  double acc = 0.0;
  for (int j = 0; j < g.n2; ++j) {
    const std::size_t k = g.index(i, j);
    const double s = (1.0 - f.z[k]) * (1.0 - f.z[k]);
    acc += (w[k] - f.mu * s * grad.d1[k] * grad.d1[k]) * g.dy;
  }
  return acc;
}

JParts j_total(const SimState& state, const JContour& contour, const SurfingBC& bc,
               const ModelParams& p) {
  const GridSpec& g = state.u.grid();
  contour.validate(g);
  const BoundaryValues boundary = surfing_boundary(g, bc, state.t);
  const JField f{state.u, state.z, boundary, p.mu, p.eta};
  JParts out;
  out.j1 = j_gamma1(f, contour.x1_left, contour.gamma1_form);
  if (contour.uses_domain_boundary) {
    out.j2 = j_gamma2(f);
    out.j3 = j_gamma3(f, contour.x1_left);
    out.j4 = j_gamma4(f, contour.x1_left);
  }
  out.total = out.j1 + out.j2 + out.j3 + out.j4;
  out.j2_warning = std::abs(out.j2) > 0.01 * std::abs(out.total);
  return out;
}

std::optional<double> JSeries::peak() const {
  if (valid_begin >= valid_end) return std::nullopt;
  return *std::max_element(normalized.begin() + valid_begin, normalized.begin() + valid_end);
}

JSeries j_series(const Trajectory& traj, const JContour& contour, const JSeriesOptions& opts) {
  contour.validate(traj.grid);
  JSeries s;
  s.j_ref = 1.0;
  bool started = false;
  for (const SimState& state : traj.snapshots) {
    const JParts parts = j_total(state, contour, traj.bc, traj.params);
    s.steps.push_back(state.step);
    s.times.push_back(state.t);
    s.j1.push_back(parts.j1);
    s.j2.push_back(parts.j2);
    s.j3.push_back(parts.j3);
    s.j4.push_back(parts.j4);
    s.total.push_back(parts.total);
    s.normalized.push_back(parts.total);
    s.tip_x1.push_back(state.tip.x1);

    const std::size_t idx = s.size() - 1;
    if (!started) {
      if (state.tip.x1 >= contour.x1_left + opts.tip_lead && !parts.j2_warning) {
        started = true;
        s.valid_begin = idx;
        s.valid_end = idx + 1;
      } else {
        s.valid_begin = s.valid_end = idx + 1;
      }
    } else if (s.valid_end == idx && !parts.j2_warning) {
      s.valid_end = idx + 1;
    }
  }
  return s;
}

double reference_j(const Trajectory& homogeneous, const JContour& contour,
                   const JSeriesOptions& opts) {
  const SimState* state = homogeneous.at_step(opts.reference_step);
  if (!state) {
    throw MissingReference("reference trajectory has no snapshot at step " +
                           std::to_string(opts.reference_step));
  }
  return j_total(*state, contour, homogeneous.bc, homogeneous.params).total;
}

JSeries normalized_series(const Trajectory& traj, const JContour& contour,
                          std::optional<double> j_ref, const JSeriesOptions& opts) {
  if (!j_ref) throw MissingReference("no J reference value supplied");
  if (!(*j_ref > 0.0) || !std::isfinite(*j_ref)) {
    throw MissingReference("J reference must be positive and finite");
  }
  JSeries s = j_series(traj, contour, opts);
  s.j_ref = *j_ref;
  for (std::size_t k = 0; k < s.size(); ++k) s.normalized[k] = s.total[k] / *j_ref;

  // Truncate once J2 starts to matter.
  const std::size_t keep = std::max(s.valid_end, s.valid_begin);
  auto cut = [keep](auto& v) { v.resize(std::min(v.size(), keep)); };
  if (s.valid_end > s.valid_begin && s.valid_end < s.size()) {
    cut(s.steps);
    cut(s.times);
    cut(s.j1);
    cut(s.j2);
    cut(s.j3);
    cut(s.j4);
    cut(s.total);
    cut(s.normalized);
    cut(s.tip_x1);
  }
  return s;
}

}  // namespace crackfield
