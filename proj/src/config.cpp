#include "crackfield/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "crackfield/errors.hpp"

namespace crackfield {

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::JIntegral: return "jintegral";
    case RunMode::Estimate: return "estimate";
    case RunMode::Full: return "full";
  }
  return "full";
}

RunMode parse_mode(std::string_view s) {
  if (s == "simulate") return RunMode::Simulate;
  if (s == "jintegral") return RunMode::JIntegral;
  if (s == "estimate") return RunMode::Estimate;
  if (s == "full") return RunMode::Full;
  throw ValidationError("mode", "expected simulate, jintegral, estimate or full");
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ValidationError(std::string(key), "not a number: '" + std::string(v) + "'");
  }
  return out;
}

long long to_integer(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError(std::string(key), "not an integer: '" + std::string(v) + "'");
  }
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  const long long x = to_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) {
    throw ValidationError(std::string(key), "out of range");
  }
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValidationError(std::string(key), "expected true or false");
}

std::vector<double> to_list(std::string_view key, std::string_view v, std::size_t n) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = v.find(',', pos);
    const std::size_t end = comma == std::string_view::npos ? v.size() : comma;
    out.push_back(to_double(key, v.substr(pos, end - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != n) {
    throw ValidationError(std::string(key), "expected " + std::to_string(n) +
                                                " comma-separated values");
  }
  return out;
}

// Values that can only be resolved once every key has been read.
struct Pending {
  std::optional<double> A;
  bool A_default = false;
  std::optional<std::string> scenario;
  std::optional<double> gamma0;
  std::vector<Inclusion> inclusions;
  double L = 5.0, H = 1.0, dx = 0.01;
  bool grid_touched = false;
  bool x1_left_given = false;
};

void set_key(RunConfig& c, Pending& p, std::string_view key, std::string_view v) {
  const std::string k(key);
  if (k == "mode") c.mode = parse_mode(lower(v));
  else if (k == "scenario") p.scenario = std::string(v);
  else if (k == "gamma0") p.gamma0 = to_double(k, v);
  else if (k == "stripe") {
    const auto x = to_list(k, v, 4);
    p.inclusions.push_back(Stripe{x[0], x[1], x[2], x[3]});
  } else if (k == "disk") {
    const auto x = to_list(k, v, 4);
    p.inclusions.push_back(Disk{x[0], x[1], x[2], x[3]});
  } else if (k == "A") {
    if (lower(v) == "default") {
      p.A_default = true;
      p.A.reset();
    } else {
      p.A = to_double(k, v);
      p.A_default = false;
    }
  } else if (k == "v") c.bc.v = to_double(k, v);
  else if (k == "d") c.bc.d = to_double(k, v);
  else if (k == "variant") {
    const std::string s = lower(v);
    if (s == "at1") c.params.variant = Variant::AT1;
    else if (s == "at2") c.params.variant = Variant::AT2;
    else throw ValidationError(k, "expected AT1 or AT2");
  } else if (k == "epsilon") c.params.epsilon = to_double(k, v);
  else if (k == "mu") c.params.mu = to_double(k, v);
  else if (k == "alpha2") c.params.alpha2 = to_double(k, v);
  else if (k == "dt") c.params.dt = to_double(k, v);
  else if (k == "eta") c.params.eta = to_double(k, v);
  else if (k == "z_clamp") c.params.z_clamp = to_bool(k, v);
  else if (k == "L") { p.L = to_double(k, v); p.grid_touched = true; }
  else if (k == "H") { p.H = to_double(k, v); p.grid_touched = true; }
  else if (k == "dx") { p.dx = to_double(k, v); p.grid_touched = true; }
  else if (k == "n_steps") c.n_steps = to_int(k, v);
  else if (k == "notch_length") c.notch_length = to_double(k, v);
  else if (k == "record_every") c.record_every = to_int(k, v);
  else if (k == "stagger_max") c.step.stagger_max = to_int(k, v);
  else if (k == "stagger_tol") c.step.stagger_tol = to_double(k, v);
  else if (k == "projection") {
    try {
      c.step.projection = parse_projection(lower(v));
    } catch (const std::invalid_argument&) {
      throw ValidationError(k, "expected active_set or max");
    }
  } else if (k == "notch_noise") c.notch_noise = to_double(k, v);
  else if (k == "noise_seed") {
    const long long x = to_integer(k, v);
    if (x < 0) throw ValidationError(k, "must be non-negative");
    c.noise_seed = static_cast<std::uint64_t>(x);
  }
  else if (k == "drive") {
    const std::string s = lower(v);
    if (s == "flux") c.step.drive = DriveGradient::Flux;
    else if (s == "centered") c.step.drive = DriveGradient::Centered;
    else throw ValidationError(k, "expected flux or centered");
  } else if (k == "tip_threshold") c.step.tip_threshold = to_double(k, v);
  else if (k == "elastic_tol") c.step.elastic.tol = to_double(k, v);
  else if (k == "crack_tol") c.step.crack.tol = to_double(k, v);
  else if (k == "x1_left") {
    c.contour.x1_left = to_double(k, v);
    p.x1_left_given = true;
  }
  else if (k == "gamma1_form") {
    const std::string s = lower(v);
    if (s == "contour") c.contour.gamma1_form = Gamma1Form::Contour;
    else if (s == "quoted") c.contour.gamma1_form = Gamma1Form::Quoted;
    else throw ValidationError(k, "expected contour or quoted");
  } else if (k == "tip_lead") c.jopts.tip_lead = to_double(k, v);
  else if (k == "reference_step") c.jopts.reference_step = to_int(k, v);
  else if (k == "n0") c.estimation.n0 = to_int(k, v);
  else if (k == "n1") c.estimation.n1 = to_int(k, v);
  else if (k == "nx1") c.estimation.nx1 = to_int(k, v);
  else if (k == "nx2") c.estimation.nx2 = to_int(k, v);
  else if (k == "k") c.estimation.k = to_int(k, v);
  else if (k == "seed") {
    const long long s = to_integer(k, v);
    if (s < 0) throw ValidationError(k, "must be non-negative");
    c.estimation.seed = static_cast<std::uint64_t>(s);
  } else if (k == "degree") c.estimation.degree = to_int(k, v);
  else if (k == "window") {
    const auto x = to_list(k, v, 3);
    for (double w : x) {
      if (w != std::floor(w)) throw ValidationError(k, "window sizes must be integers");
    }
    c.estimation.window = {static_cast<int>(x[0]), static_cast<int>(x[1]),
                           static_cast<int>(x[2])};
  } else if (k == "route") {
    const std::string s = lower(v);
    if (s == "auto") c.estimation.route.reset();
    else if (s == "uncracked") c.estimation.route = SamplingRoute::Uncracked;
    else if (s == "near_tip") c.estimation.route = SamplingRoute::NearTip;
    else throw ValidationError(k, "expected auto, uncracked or near_tip");
  } else if (k == "kmeans_max_iter") c.estimation.kmeans.max_iter = to_int(k, v);
  else if (k == "kmeans_restarts") c.estimation.kmeans.restarts = to_int(k, v);
  else if (k == "output_dir") c.output_dir = std::string(v);
  else if (k == "archive_dir") c.archive_dir = std::string(v);
  else if (k == "reference_archive") c.reference_archive = std::string(v);
  else if (k == "field_format") {
    const std::string s = lower(v);
    if (s == "text") c.field_format = FieldFormat::Text;
    else if (s == "binary") c.field_format = FieldFormat::Binary;
    else if (s == "both") c.field_format = FieldFormat::Both;
    else throw ValidationError(k, "expected text, binary or both");
  } else if (k == "plots") c.plots = to_bool(k, v);
  else throw ValidationError(k, "unknown key");
}

void resolve(RunConfig& c, Pending& p, bool require_A) {
  if (p.scenario) {
    if (lower(*p.scenario) == "custom") {
      c.scenario = ToughnessScenario{"custom", 0.5, {}};
    } else {
      try {
        c.scenario = preset(*p.scenario);
      } catch (const UnknownCase& e) {
        throw ValidationError("scenario", e.what());
      }
    }
  }
  if (!p.inclusions.empty()) {
    if (c.scenario.name != "custom") {
      throw ValidationError("scenario", "inline stripe/disk entries need scenario=custom");
    }
    c.scenario.inclusions.insert(c.scenario.inclusions.end(), p.inclusions.begin(),
                                 p.inclusions.end());
  }
  if (p.gamma0) c.scenario.gamma0 = *p.gamma0;
  try {
    c.scenario.validate();
  } catch (const InvalidScenario& e) {
    throw ValidationError("scenario", e.what());
  }

  if (p.A_default) {
    if (c.scenario.name == "custom") {
      throw ValidationError("A", "custom scenarios have no default applied strain");
    }
    c.bc.A = preset_default_A(c.scenario.name);
  } else if (p.A) {
    c.bc.A = *p.A;
  } else if (require_A) {
    throw ValidationError("A", "required (use A=default for the preset's value)");
  }

  if (p.grid_touched) {
    try {
      c.grid = make_grid(p.L, p.H, p.dx);
    } catch (const NonIntegralDivision& e) {
      throw ValidationError("dx", e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError("dx", e.what());
    }
    // An unset contour follows the grid to its nearest face.
    if (!p.x1_left_given) {
      const double face = std::clamp(std::round(c.contour.x1_left / c.grid.dx), 1.0,
                                     c.grid.n1 - 1.0);
      c.contour.x1_left = face * c.grid.dx;
    }
  }
  if (c.estimation.variant != c.params.variant) c.estimation.variant = c.params.variant;
}

std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool mode_simulates(RunMode m) { return m == RunMode::Simulate || m == RunMode::Full; }

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  c.scenario = preset("I");
  Pending p;
  bool scenario_given = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = strip_comment(text.substr(pos, end - pos));
    ++line_no;
    std::istringstream tokens{std::string(line)};
    std::string tok;
    while (tokens >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ParseError(line_no, "expected key=value, got '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      const std::string value = tok.substr(eq + 1);
      if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
      if (key == "scenario") scenario_given = true;
      set_key(c, p, key, value);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (mode_simulates(c.mode) && !scenario_given) {
    throw ValidationError("scenario", "required for simulating modes");
  }
  resolve(c, p, mode_simulates(c.mode));
  validate(c);
  return c;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == assignment.size()) {
    throw ParseError(0, "override must be key=value: '" + std::string(assignment) + "'");
  }
  Pending p;
  set_key(cfg, p, assignment.substr(0, eq), assignment.substr(eq + 1));
  if (p.grid_touched) {
    // Other grid extents keep their current values.
    if (assignment.substr(0, eq) != "L") p.L = cfg.grid.L;
    if (assignment.substr(0, eq) != "H") p.H = cfg.grid.H;
    if (assignment.substr(0, eq) != "dx") p.dx = cfg.grid.dx;
  }
  if (p.scenario && lower(*p.scenario) == "custom") {
    throw ValidationError("scenario", "custom layouts must be given in the config file");
  }
  resolve(cfg, p, false);
  validate(cfg);
}

namespace {

std::string num(double x) { return fmt::format("{}", x); }

}  // namespace

std::string config_to_text(const RunConfig& c) {
  std::string out;
  auto put = [&out](std::string_view k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  put("mode", std::string(to_string(c.mode)));
  put("scenario", c.scenario.name);
  put("gamma0", num(c.scenario.gamma0));
  if (c.scenario.name == "custom") {
    for (const Inclusion& inc : c.scenario.inclusions) {
      if (const auto* s = std::get_if<Stripe>(&inc)) {
        put("stripe", num(s->period) + "," + num(s->width) + "," + num(s->phase) + "," +
                          num(s->gamma1));
      } else {
        const Disk& d = std::get<Disk>(inc);
        put("disk", num(d.cx) + "," + num(d.cy) + "," + num(d.radius) + "," + num(d.gamma1));
      }
    }
  }
  put("A", num(c.bc.A));
  put("v", num(c.bc.v));
  put("d", num(c.bc.d));
  put("variant", c.params.variant == Variant::AT1 ? "AT1" : "AT2");
  put("epsilon", num(c.params.epsilon));
  put("mu", num(c.params.mu));
  put("alpha2", num(c.params.alpha2));
  put("dt", num(c.params.dt));
  put("eta", num(c.params.eta));
  put("z_clamp", c.params.z_clamp ? "true" : "false");
  put("L", num(c.grid.L));
  put("H", num(c.grid.H));
  put("dx", num(c.grid.dx));
  put("n_steps", std::to_string(c.n_steps));
  put("notch_length", num(c.notch_length));
  put("record_every", std::to_string(c.record_every));
  put("stagger_max", std::to_string(c.step.stagger_max));
  put("stagger_tol", num(c.step.stagger_tol));
  put("projection", std::string(to_string(c.step.projection)));
  put("notch_noise", num(c.notch_noise));
  put("noise_seed", std::to_string(c.noise_seed));
  put("drive", c.step.drive == DriveGradient::Flux ? "flux" : "centered");
  put("tip_threshold", num(c.step.tip_threshold));
  put("elastic_tol", num(c.step.elastic.tol));
  put("crack_tol", num(c.step.crack.tol));
  put("x1_left", num(c.contour.x1_left));
  put("gamma1_form", c.contour.gamma1_form == Gamma1Form::Contour ? "contour" : "quoted");
  put("tip_lead", num(c.jopts.tip_lead));
  put("reference_step", std::to_string(c.jopts.reference_step));
  const EstimationConfig& e = c.estimation;
  put("n0", std::to_string(e.n0));
  put("n1", std::to_string(e.n1));
  put("nx1", std::to_string(e.nx1));
  put("nx2", std::to_string(e.nx2));
  put("k", std::to_string(e.k));
  put("seed", std::to_string(e.seed));
  put("degree", std::to_string(e.degree));
  put("window", std::to_string(e.window.cells_x1) + "," + std::to_string(e.window.cells_x2) +
                    "," + std::to_string(e.window.steps));
  put("route", !e.route                              ? "auto"
               : *e.route == SamplingRoute::NearTip ? "near_tip"
                                                    : "uncracked");
  put("kmeans_max_iter", std::to_string(e.kmeans.max_iter));
  put("kmeans_restarts", std::to_string(e.kmeans.restarts));
  put("output_dir", c.output_dir);
  if (!c.archive_dir.empty()) put("archive_dir", c.archive_dir);
  if (!c.reference_archive.empty()) put("reference_archive", c.reference_archive);
  put("field_format", c.field_format == FieldFormat::Text     ? "text"
                      : c.field_format == FieldFormat::Binary ? "binary"
                                                              : "both");
  put("plots", c.plots ? "true" : "false");
  return out;
}

void validate(const RunConfig& c) {
  c.params.validate();
  c.bc.validate();
  if (c.n_steps < 0) throw ValidationError("n_steps", "must be non-negative");
  if (c.record_every < 1) throw ValidationError("record_every", "must be at least 1");
  if (!(c.notch_length > 0.0 && c.notch_length < c.grid.L)) {
    throw ValidationError("notch_length", "must lie in (0, L)");
  }
  if (!(c.notch_noise >= 0.0)) throw ValidationError("notch_noise", "must be non-negative");
  if (c.step.stagger_max < 1) throw ValidationError("stagger_max", "must be at least 1");
  if (!(c.step.tip_threshold > 0.0 && c.step.tip_threshold <= 1.0)) {
    throw ValidationError("tip_threshold", "must lie in (0, 1]");
  }
  try {
    validate(c.grid);
  } catch (const std::invalid_argument& e) {
    throw ValidationError("dx", e.what());
  }
  c.contour.validate(c.grid);
  if (c.jopts.reference_step < 0) throw ValidationError("reference_step", "must be >= 0");
  const EstimationConfig& e = c.estimation;
  if (e.n0 < 0 || e.n1 < e.n0) throw ValidationError("n0", "need 0 <= n0 <= n1");
  if (e.nx1 < 2) throw ValidationError("nx1", "must be at least 2");
  if (e.nx2 < 2) throw ValidationError("nx2", "must be at least 2");
  if (e.k < 1) throw ValidationError("k", "must be at least 1");
  if (e.degree < 0 || e.degree > 15) throw ValidationError("degree", "must lie in [0, 15]");
  if (e.window.cells_x1 < 1 || e.window.cells_x2 < 1 || e.window.steps < 1) {
    throw ValidationError("window", "sizes must be positive");
  }
  if (e.kmeans.max_iter < 1) throw ValidationError("kmeans_max_iter", "must be at least 1");
  if (e.kmeans.restarts < 1) throw ValidationError("kmeans_restarts", "must be at least 1");
  if (c.output_dir.empty()) throw ValidationError("output_dir", "must not be empty");
}

SimulationConfig simulation_config(const RunConfig& c) {
  SimulationConfig s;
  s.grid = c.grid;
  s.scenario = c.scenario;
  s.params = c.params;
  s.bc = c.bc;
  s.n_steps = c.n_steps;
  s.notch_length = c.notch_length;
  s.record_every = c.record_every;
  s.step = c.step;
  s.notch_noise = c.notch_noise;
  s.noise_seed = c.noise_seed;
  return s;
}

}  // namespace crackfield
