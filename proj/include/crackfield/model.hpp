#pragma once

#include <string>
#include <string_view>

#include "crackfield/grid.hpp"

namespace crackfield {

/// Surface-energy variant: AT1 is linear in z, AT2 quadratic.
enum class Variant { AT1, AT2 };

std::string_view to_string(Variant v);
/// Accepts "AT1"/"AT2" (case-insensitive); throws std::invalid_argument.
Variant parse_variant(std::string_view text);

struct ModelParams {
  Variant variant = Variant::AT2;
  double epsilon = 0.02;  ///< regularization length
  double mu = 1.0;        ///< shear modulus
  double alpha2 = 1e-3;   ///< crack-field relaxation time
  double dt = 1e-2;
  double eta = 1e-6;      ///< residual stiffness floor on (1-z)^2
  bool z_clamp = true;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Translating tanh profile g = A/2 (1 - tanh((x1 - v t)/d)) sign(x2 - H/2).
struct SurfingBC {
  double A = 1.25;
  double v = 1.0;
  double d = 0.5;

  void validate() const;
};

/// sign(0) is 0, so the midline itself carries zero displacement.
double surfing_displacement(const SurfingBC& bc, double x1, double x2, double H, double t);

struct TipPosition {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct SimState {
  int step = 0;
  double t = 0.0;
  ScalarField z;
  ScalarField u;
  TipPosition tip;
};

}  // namespace crackfield
