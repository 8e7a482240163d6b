#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crackfield/config.hpp"
#include "crackfield/phase_field.hpp"

namespace crackfield {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct TrajectoryArchive {
  std::string dir;
  std::string manifest;  ///< path of manifest.txt
  std::vector<std::string> files;  ///< snapshot files, relative to dir
};

/// Writes manifest.txt (resolved config echo, snapshot list with checksums,
/// per-step tip series) and one field file per recorded snapshot. Text files
/// hold rows `i j x1 x2 z u`; binary twins hold a 16-byte header (8-byte
/// magic, uint32 n1, uint32 n2) then z and u as little-endian doubles. All
/// numbers round-trip exactly. `cfg`, when given, supplies the non-trajectory
/// part of the echo. Throws IoError.
TrajectoryArchive save_trajectory(const Trajectory& traj, const std::string& dir,
                                  FieldFormat format = FieldFormat::Text,
                                  const RunConfig* cfg = nullptr);

/// Reads an archive back; binary twins are preferred when listed. Throws
/// CorruptArchive for a missing manifest, missing files (all listed) or a
/// checksum or shape mismatch.
Trajectory load_trajectory(const std::string& dir);

/// The config echo embedded in an archive's manifest.
RunConfig load_archive_config(const std::string& dir);

}  // namespace crackfield
