#pragma once

#include <string>
#include <vector>

#include "crackfield/inverse.hpp"
#include "crackfield/j_integral.hpp"
#include "crackfield/phase_field.hpp"

namespace crackfield {

struct PlotArtifacts {
  const Trajectory* trajectory = nullptr;
  const JSeries* j = nullptr;
  const EstimationReport* estimate = nullptr;
};

/// z heatmap of the last snapshot with inclusion outlines.
std::string svg_crack_field(const Trajectory& traj);
/// Tip x1 against t with the inclusion x1-ranges on the midline shaded.
std::string svg_tip_position(const Trajectory& traj);
/// Normalized J against t; the valid window is drawn solid.
std::string svg_j_series(const JSeries& j);
/// (X, Y) scatter colored by class with the fitted lines Y = gamma X.
std::string svg_xy_scatter(const EstimationReport& rep);
/// Positions of the sample points in the domain, colored by class.
std::string svg_class_map(const EstimationReport& rep, double L, double H);

/// Writes every plot the artifacts support into dir and returns the paths.
/// An empty J series is skipped with a warning. Throws IoError.
std::vector<std::string> emit_plots(const PlotArtifacts& artifacts, const std::string& dir);

}  // namespace crackfield
