#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crackfield/grid.hpp"
#include "crackfield/inverse.hpp"
#include "crackfield/j_integral.hpp"
#include "crackfield/model.hpp"
#include "crackfield/phase_field.hpp"
#include "crackfield/toughness.hpp"

namespace crackfield {

enum class RunMode { Simulate, JIntegral, Estimate, Full };

enum class FieldFormat { Text, Binary, Both };

struct RunConfig {
  RunMode mode = RunMode::Full;
  ToughnessScenario scenario;
  GridSpec grid;
  ModelParams params;
  SurfingBC bc;
  int n_steps = 200;
  double notch_length = 0.25;
  double notch_noise = 0.0;  ///< amplitude of uniform noise added to the notch
  std::uint64_t noise_seed = 0;
  int record_every = 1;
  StepOptions step;
  JContour contour;
  JSeriesOptions jopts;
  EstimationConfig estimation;
  std::string output_dir = "out";
  /// Archive consulted by the jintegral and estimate modes; defaults to output_dir.
  std::string archive_dir;
  /// Homogeneous archive used for J normalization; when empty a case-I run
  /// with the same parameters is simulated up to the reference step.
  std::string reference_archive;
  FieldFormat field_format = FieldFormat::Text;
  bool plots = true;

  const std::string& effective_archive() const {
    return archive_dir.empty() ? output_dir : archive_dir;
  }
};

std::string_view to_string(RunMode m);
RunMode parse_mode(std::string_view s);

/// Parses whitespace-separated `key=value` tokens; `#` starts a comment.
/// Omitted keys keep their defaults. `A` is required; `A=default` takes the
/// preset's published value. Inline layouts use `scenario=custom` with
/// `gamma0=`, repeated `stripe=period,width,phase,gamma1` and
/// `disk=cx,cy,radius,gamma1`. Throws ParseError for malformed lines and
/// ValidationError(key) for bad values.
RunConfig parse_config(std::string_view text);

/// Applies one `key=value` on top of an existing config (CLI overrides).
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Fully resolved config as text accepted by parse_config.
std::string config_to_text(const RunConfig& cfg);

/// Cross-field checks: grid divisibility, parameter ranges, estimation windows.
void validate(const RunConfig& cfg);

SimulationConfig simulation_config(const RunConfig& cfg);

}  // namespace crackfield
