#include "crackfield/archive.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "crackfield/errors.hpp"

namespace crackfield {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr char kManifestHeader[] = "crackfield-archive 1";
constexpr char kMagic[8] = {'C', 'R', 'K', 'F', 'L', 'D', '0', '1'};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorruptArchive("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

std::string hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

template <class T>
void put_le(std::string& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    out.append(reinterpret_cast<const char*>(b), sizeof(T));
  } else {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <class T>
T get_le(const char* p) {
  T value;
  unsigned char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  }
  std::memcpy(&value, b, sizeof(T));
  return value;
}

std::string text_field(const SimState& s) {
  const GridSpec& g = s.z.grid();
  std::string out = fmt::format("# step={} t={} n1={} n2={}\n# i j x1 x2 z u\n", s.step, s.t,
                                g.n1, g.n2);
  out.reserve(out.size() + static_cast<std::size_t>(g.n1) * g.n2 * 48);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      fmt::format_to(std::back_inserter(out), "{} {} {} {} {} {}\n", i, j, g.x1(i), g.x2(j),
                     s.z(i, j), s.u(i, j));
    }
  return out;
}

std::string binary_field(const SimState& s) {
  const GridSpec& g = s.z.grid();
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n1));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n2));
  for (double v : s.z.values()) put_le<double>(out, v);
  for (double v : s.u.values()) put_le<double>(out, v);
  return out;
}

double parse_double(std::string_view v, const std::string& where) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw CorruptArchive(where + ": bad number '" + std::string(v) + "'");
  }
  return out;
}

int parse_int(std::string_view v, const std::string& where) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw CorruptArchive(where + ": bad integer '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void read_text_field(std::string_view bytes, const GridSpec& g, ScalarField& z, ScalarField& u,
                     const std::string& name) {
  std::size_t pos = 0;
  std::size_t rows = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    const std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split_ws(line);
    if (cols.size() != 6) throw CorruptArchive(name + ": expected 6 columns");
    const int i = parse_int(cols[0], name);
    const int j = parse_int(cols[1], name);
    if (i < 0 || i >= g.n1 || j < 0 || j >= g.n2) throw CorruptArchive(name + ": cell out of range");
    z(i, j) = parse_double(cols[4], name);
    u(i, j) = parse_double(cols[5], name);
    ++rows;
  }
  if (rows != static_cast<std::size_t>(g.n1) * g.n2) {
    throw CorruptArchive(name + ": expected " + std::to_string(g.n1 * g.n2) + " rows, found " +
                         std::to_string(rows));
  }
}

void read_binary_field(std::string_view bytes, const GridSpec& g, ScalarField& z, ScalarField& u,
                       const std::string& name) {
  const std::size_t cells = static_cast<std::size_t>(g.n1) * g.n2;
  if (bytes.size() != 16 + 16 * cells || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw CorruptArchive(name + ": bad binary header or size");
  }
  if (get_le<std::uint32_t>(bytes.data() + 8) != static_cast<std::uint32_t>(g.n1) ||
      get_le<std::uint32_t>(bytes.data() + 12) != static_cast<std::uint32_t>(g.n2)) {
    throw CorruptArchive(name + ": grid shape mismatch");
  }
  const char* p = bytes.data() + 16;
  for (std::size_t k = 0; k < cells; ++k) z[k] = get_le<double>(p + 8 * k);
  p += 8 * cells;
  for (std::size_t k = 0; k < cells; ++k) u[k] = get_le<double>(p + 8 * k);
}

RunConfig echo_config(const Trajectory& traj, const RunConfig* cfg) {
  RunConfig c = cfg ? *cfg : RunConfig{};
  c.scenario = traj.scenario;
  c.grid = traj.grid;
  c.params = traj.params;
  c.bc = traj.bc;
  c.notch_length = traj.notch_length;
  c.record_every = traj.record_every;
  c.estimation.variant = traj.params.variant;
  if (!traj.tip_series.empty()) c.n_steps = traj.tip_series.back().step;
  // Keep the echo loadable on grids where the contour default is not a face.
  try {
    c.contour.validate(c.grid);
  } catch (const ValidationError&) {
    const double dx = c.grid.dx;
    const double face = std::clamp(std::round(c.contour.x1_left / dx), 1.0, c.grid.n1 - 1.0);
    c.contour.x1_left = face * dx;
  }
  return c;
}

struct Manifest {
  std::string config;
  struct Entry {
    int step = 0;
    double t = 0.0;
    double tip_x1 = 0.0, tip_x2 = 0.0;
    std::string text, text_sum, bin, bin_sum;
  };
  std::vector<Entry> snapshots;
  std::vector<TipSample> tips;
};

Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.txt";
  if (!fs::exists(path)) throw CorruptArchive("no manifest.txt in " + dir.string());
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw CorruptArchive("unrecognized manifest header in " + path.string());
  }
  Manifest m;
  std::string section;
  bool ended = false;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "manifest line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      if (section == "[end]") ended = true;
      continue;
    }
    if (section == "[config]") {
      m.config += line;
      m.config += '\n';
    } else if (section == "[snapshots]") {
      const auto cols = split_ws(line);
      if (cols.size() != 6 && cols.size() != 8) throw CorruptArchive(where + ": bad snapshot row");
      Manifest::Entry e;
      e.step = parse_int(cols[0], where);
      e.t = parse_double(cols[1], where);
      e.tip_x1 = parse_double(cols[2], where);
      e.tip_x2 = parse_double(cols[3], where);
      e.text = std::string(cols[4]);
      e.text_sum = std::string(cols[5]);
      if (cols.size() == 8) {
        e.bin = std::string(cols[6]);
        e.bin_sum = std::string(cols[7]);
      }
      m.snapshots.push_back(std::move(e));
    } else if (section == "[tips]") {
      const auto cols = split_ws(line);
      if (cols.size() != 4) throw CorruptArchive(where + ": bad tip row");
      m.tips.push_back({parse_int(cols[0], where), parse_double(cols[1], where),
                        parse_double(cols[2], where), parse_double(cols[3], where)});
    } else {
      throw CorruptArchive(where + ": content outside a section");
    }
  }
  if (!ended) throw CorruptArchive("manifest is truncated (no [end])");
  return m;
}

}  // namespace

TrajectoryArchive save_trajectory(const Trajectory& traj, const std::string& dir,
                                  FieldFormat format, const RunConfig* cfg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  TrajectoryArchive archive;
  archive.dir = dir;
  archive.manifest = (fs::path(dir) / "manifest.txt").string();

  std::string manifest = std::string(kManifestHeader) + "\n[config]\n";
  manifest += config_to_text(echo_config(traj, cfg));
  manifest += "[snapshots]\n";
  const bool text = format != FieldFormat::Binary;
  const bool binary = format != FieldFormat::Text;
  for (const SimState& s : traj.snapshots) {
    const std::string stem = fmt::format("snapshot_{:06d}", s.step);
    // The text column is always present; binary-only archives mark it "-".
    std::string text_name = "-", text_sum = "-";
    if (text) {
      text_name = stem + ".txt";
      const std::string body = text_field(s);
      write_file(fs::path(dir) / text_name, body);
      text_sum = hex(fnv1a(body));
      archive.files.push_back(text_name);
    }
    manifest += fmt::format("{} {} {} {} {} {}", s.step, s.t, s.tip.x1, s.tip.x2, text_name,
                            text_sum);
    if (binary) {
      const std::string bin_name = stem + ".bin";
      const std::string body = binary_field(s);
      write_file(fs::path(dir) / bin_name, body);
      manifest += fmt::format(" {} {}", bin_name, hex(fnv1a(body)));
      archive.files.push_back(bin_name);
    }
    manifest += '\n';
  }
  manifest += "[tips]\n";
  for (const TipSample& t : traj.tip_series) {
    manifest += fmt::format("{} {} {} {}\n", t.step, t.t, t.x1, t.x2);
  }
  manifest += "[end]\n";
  write_file(archive.manifest, manifest);
  return archive;
}

RunConfig load_archive_config(const std::string& dir) {
  const Manifest m = read_manifest(dir);
  try {
    return parse_config(m.config);
  } catch (const Error& e) {
    throw CorruptArchive(std::string("config echo: ") + e.what());
  }
}

Trajectory load_trajectory(const std::string& dir) {
  const Manifest m = read_manifest(dir);
  RunConfig cfg;
  try {
    cfg = parse_config(m.config);
  } catch (const Error& e) {
    throw CorruptArchive(std::string("config echo: ") + e.what());
  }

  std::vector<std::string> missing;
  for (const auto& e : m.snapshots) {
    if (e.text != "-" && !fs::exists(fs::path(dir) / e.text)) missing.push_back(e.text);
    if (!e.bin.empty() && !fs::exists(fs::path(dir) / e.bin)) missing.push_back(e.bin);
    if (e.text == "-" && e.bin.empty()) throw CorruptArchive("snapshot without a field file");
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
    throw CorruptArchive("missing files: " + list);
  }

  Trajectory traj;
  traj.grid = cfg.grid;
  traj.params = cfg.params;
  traj.scenario = cfg.scenario;
  traj.bc = cfg.bc;
  traj.notch_length = cfg.notch_length;
  traj.record_every = cfg.record_every;
  traj.tip_series = m.tips;
  for (const auto& e : m.snapshots) {
    SimState s{e.step, e.t, ScalarField(cfg.grid), ScalarField(cfg.grid), {e.tip_x1, e.tip_x2}};
    const bool use_bin = !e.bin.empty();
    const std::string& name = use_bin ? e.bin : e.text;
    const std::string& sum = use_bin ? e.bin_sum : e.text_sum;
    const std::string bytes = read_file(fs::path(dir) / name);
    if (hex(fnv1a(bytes)) != sum) throw CorruptArchive(name + ": checksum mismatch");
    if (use_bin) {
      read_binary_field(bytes, cfg.grid, s.z, s.u, name);
    } else {
      read_text_field(bytes, cfg.grid, s.z, s.u, name);
    }
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

}  // namespace crackfield
