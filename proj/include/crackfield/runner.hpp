#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crackfield/config.hpp"

namespace crackfield {

/// Ordered key=value results of a run.
class RunSummary {
public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }

  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string text() const;

  static RunSummary parse(const std::string& text);

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Executes cfg.mode and writes summary.txt, run.log, the archive (simulating
/// modes) and plots under cfg.output_dir. `full` chains simulate, jintegral
/// and estimate. Errors propagate.
RunSummary run_pipeline(const RunConfig& cfg);

/// run_pipeline with errors logged; returns the process exit status.
int run(const RunConfig& cfg);

}  // namespace crackfield
