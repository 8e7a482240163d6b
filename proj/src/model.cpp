#include "crackfield/model.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "crackfield/errors.hpp"

namespace crackfield {

std::string_view to_string(Variant v) { return v == Variant::AT1 ? "AT1" : "AT2"; }

Variant parse_variant(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "AT1") return Variant::AT1;
  if (upper == "AT2") return Variant::AT2;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

void ModelParams::validate() const {
  auto positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError(name, "must be positive");
  };
  positive(epsilon, "epsilon");
  positive(mu, "mu");
  positive(alpha2, "alpha2");
  positive(dt, "dt");
  if (!(eta >= 0.0) || eta >= 1e-2) throw ValidationError("eta", "must lie in [0, 1e-2)");
}

void SurfingBC::validate() const {
  if (!(d > 0.0)) throw ValidationError("d", "must be positive");
  if (!(v >= 0.0)) throw ValidationError("v", "must be non-negative");
  if (!std::isfinite(A)) throw ValidationError("A", "must be finite");
}

double surfing_displacement(const SurfingBC& bc, double x1, double x2, double H, double t) {
  const double s = x2 - 0.5 * H;
  const double sign = (s > 0.0) - (s < 0.0);
  return 0.5 * bc.A * (1.0 - std::tanh((x1 - bc.v * t) / bc.d)) * sign;
}

}  // namespace crackfield
