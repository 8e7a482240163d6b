#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crackfield/grid.hpp"

namespace crackfield {

/// Periodic band along x1: cells with ((x1 - phase) mod period) < width get gamma1.
struct Stripe {
  double period = 1.0;
  double width = 0.5;
  double phase = 0.5;
  double gamma1 = 0.75;
};

struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.2;
  double gamma1 = 0.75;
};

using Inclusion = std::variant<Stripe, Disk>;

struct ToughnessScenario {
  std::string name;  ///< preset id or "custom"
  double gamma0 = 0.5;
  std::vector<Inclusion> inclusions;

  /// Throws InvalidScenario when an invariant is broken.
  void validate() const;
};

/// Piecewise-constant toughness sampled at cell centers.
using ToughnessField = ScalarField;

bool contains(const Inclusion& inc, double x1, double x2);
double inclusion_gamma(const Inclusion& inc);

/// Each cell takes gamma1 of the first inclusion containing its center, else gamma0.
ToughnessField rasterize(const ToughnessScenario& s, const GridSpec& g);

/// Layouts I..VII (roman numeral, case-insensitive). Throws UnknownCase.
ToughnessScenario preset(std::string_view case_id);

/// Applied strain used with a preset in the published figures: 1.25 for I-IV, 1 for V-VII.
double preset_default_A(std::string_view case_id);

/// x1 intervals where the horizontal line x2 = y crosses an inclusion, clipped to [0, L].
std::vector<std::pair<double, double>> inclusion_bands(const ToughnessScenario& s, double y,
                                                       double L);

}  // namespace crackfield
