#include "crackfield/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/spdlog.h>

#include "crackfield/archive.hpp"
#include "crackfield/errors.hpp"
#include "crackfield/inverse.hpp"
#include "crackfield/j_integral.hpp"
#include "crackfield/plots.hpp"

namespace crackfield {

void RunSummary::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void RunSummary::set(const std::string& key, double value) { set(key, fmt::format("{}", value)); }

void RunSummary::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

std::optional<std::string> RunSummary::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string RunSummary::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

RunSummary RunSummary::parse(const std::string& text) {
  RunSummary s;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(n, "expected key=value");
    s.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return s;
}

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger(const std::string& dir) {
  std::vector<spdlog::sink_ptr> sinks;
  if (auto def = spdlog::default_logger()) {
    sinks.insert(sinks.end(), def->sinks().begin(), def->sinks().end());
  }
  const std::string path = (fs::path(dir) / "run.log").string();
  try {
    sinks.push_back(std::make_shared<spdlog::sinks::basic_file_sink_mt>(path, true));
  } catch (const spdlog::spdlog_ex& e) {
    throw IoError(std::string("cannot open log file: ") + e.what());
  }
  auto logger = std::make_shared<spdlog::logger>("run", sinks.begin(), sinks.end());
  logger->set_level(spdlog::default_logger() ? spdlog::default_logger()->level()
                                             : spdlog::level::info);
  logger->sinks().back()->set_level(spdlog::level::info);
  logger->flush_on(spdlog::level::info);
  return logger;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : ",") + fmt::format("{}", x);
  return out;
}

void tip_summary(const Trajectory& traj, RunSummary& s) {
  if (traj.tip_series.empty()) return;
  const TipSample& last = traj.tip_series.back();
  double dev = 0.0;
  for (const TipSample& t : traj.tip_series) dev = std::max(dev, std::abs(t.x2 - 0.5 * traj.grid.H));
  s.set("tip_final_x1", last.x1);
  s.set("tip_final_x2", last.x2);
  s.set("tip_max_dev_x2", dev);
  // Least-squares speed over the last three quarters of the run.
  const int from = last.step / 4;
  double n = 0, st = 0, sx = 0, stt = 0, stx = 0;
  for (const TipSample& t : traj.tip_series) {
    if (t.step < from) continue;
    n += 1;
    st += t.t;
    sx += t.x1;
    stt += t.t * t.t;
    stx += t.t * t.x1;
  }
  const double det = n * stt - st * st;
  if (n >= 2 && det > 0.0) s.set("tip_speed", (n * stx - st * sx) / det);
}

Trajectory reference_trajectory(const Trajectory& traj, const RunConfig& cfg,
                                spdlog::logger& log) {
  if (!cfg.reference_archive.empty()) {
    log.info("loading J reference archive {}", cfg.reference_archive);
    return load_trajectory(cfg.reference_archive);
  }
  SimulationConfig sim;
  sim.grid = traj.grid;
  sim.params = traj.params;
  sim.bc = traj.bc;
  sim.notch_length = traj.notch_length;
  sim.notch_noise = cfg.notch_noise;
  sim.noise_seed = cfg.noise_seed;
  sim.scenario = ToughnessScenario{"I", traj.scenario.gamma0, {}};
  sim.n_steps = cfg.jopts.reference_step;
  sim.record_every = std::max(1, cfg.jopts.reference_step);
  sim.step = cfg.step;
  log.info("simulating homogeneous reference to step {}", sim.n_steps);
  return run_simulation(sim);
}

JSeries j_stage(const Trajectory& traj, const RunConfig& cfg, spdlog::logger& log,
                RunSummary& s) {
  double j_ref = 0.0;
  if (traj.scenario.inclusions.empty() && traj.at_step(cfg.jopts.reference_step)) {
    j_ref = reference_j(traj, cfg.contour, cfg.jopts);
  } else {
    j_ref = reference_j(reference_trajectory(traj, cfg, log), cfg.contour, cfg.jopts);
  }
  JSeries j = normalized_series(traj, cfg.contour, j_ref, cfg.jopts);
  s.set("J_ref", j_ref);
  s.set("J_valid_points", static_cast<long long>(j.valid_end - j.valid_begin));
  if (const auto peak = j.peak()) {
    s.set("J_peak_normalized", *peak);
    s.set("J_valid_begin_step", j.steps[j.valid_begin]);
    s.set("J_valid_end_step", j.steps[j.valid_end - 1]);
    double lo = *peak;
    for (std::size_t k = j.valid_begin; k < j.valid_end; ++k) lo = std::min(lo, j.normalized[k]);
    s.set("J_min_normalized", lo);
  } else {
    log.warn("J series has no valid window");
  }
  log.info("J_ref = {:.6g}, {} valid J samples", j_ref, j.valid_end - j.valid_begin);
  return j;
}

EstimationReport estimate_stage(const Trajectory& traj, const RunConfig& cfg,
                                spdlog::logger& log, RunSummary& s) {
  EstimationConfig ec = cfg.estimation;
  ec.variant = traj.params.variant;
  EstimationReport rep = estimate(traj, ec);
  s.set("k", rep.k);
  s.set("gamma_hat", join(rep.gamma_hat));
  for (int m = 0; m < rep.k; ++m) {
    s.set(fmt::format("gamma_hat_{}", m), rep.gamma_hat[m]);
    s.set(fmt::format("class_size_{}", m), static_cast<long long>(rep.class_sizes[m]));
  }
  s.set("estimation_points", static_cast<long long>(rep.points.size()));
  s.set("kmeans_iterations", rep.iterations);
  s.set("kmeans_restarts", rep.restarts_used);
  log.info("gamma_hat = [{}] from {} points", join(rep.gamma_hat), rep.points.size());
  return rep;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out || !(out << body)) throw IoError("cannot write " + path.string());
}

}  // namespace

RunSummary run_pipeline(const RunConfig& cfg) {
  validate(cfg);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir + ": " + ec.message());
  auto log = make_logger(cfg.output_dir);
  const auto wall0 = std::chrono::steady_clock::now();
  log->info("mode {} -> {}", to_string(cfg.mode), cfg.output_dir);

  RunSummary s;
  s.set("mode", std::string(to_string(cfg.mode)));

  Trajectory traj;
  if (cfg.mode == RunMode::Simulate || cfg.mode == RunMode::Full) {
    log->info("simulating scenario {} ({}), A = {}, {} steps", cfg.scenario.name,
              cfg.params.variant == Variant::AT1 ? "AT1" : "AT2", cfg.bc.A, cfg.n_steps);
    traj = run_simulation(simulation_config(cfg), [&](const SimState& st, const StepDiagnostics& d) {
      if (st.step % 20 == 0) {
        log->debug("step {} tip ({:.3f}, {:.3f}) elastic it {} crack it {} passes {}", st.step,
                   st.tip.x1, st.tip.x2, d.elastic_iterations, d.crack_iterations,
                   d.stagger_passes);
      }
    });
    save_trajectory(traj, cfg.output_dir, cfg.field_format, &cfg);
  } else {
    log->info("loading archive {}", cfg.effective_archive());
    traj = load_trajectory(cfg.effective_archive());
  }
  s.set("scenario", traj.scenario.name);
  s.set("variant", traj.params.variant == Variant::AT1 ? "AT1" : "AT2");
  s.set("A", traj.bc.A);
  s.set("steps", traj.tip_series.empty() ? 0 : traj.tip_series.back().step);
  tip_summary(traj, s);

  std::optional<JSeries> j;
  std::optional<EstimationReport> rep;
  if (cfg.mode == RunMode::JIntegral || cfg.mode == RunMode::Full) {
    j = j_stage(traj, cfg, *log, s);
  }
  if (cfg.mode == RunMode::Estimate || cfg.mode == RunMode::Full) {
    rep = estimate_stage(traj, cfg, *log, s);
  }
  if (cfg.plots) {
    PlotArtifacts art;
    art.trajectory = &traj;
    art.j = j ? &*j : nullptr;
    art.estimate = rep ? &*rep : nullptr;
    for (const std::string& f : emit_plots(art, (fs::path(cfg.output_dir) / "plots").string())) {
      log->debug("wrote {}", f);
    }
  }
  write_text(fs::path(cfg.output_dir) / "summary.txt", s.text());
  write_text(fs::path(cfg.output_dir) / "config.resolved.txt", config_to_text(cfg));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  log->info("done in {:.1f} s", wall);
  return s;
}

int run(const RunConfig& cfg) {
  try {
    run_pipeline(cfg);
    return 0;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}

}  // namespace crackfield
