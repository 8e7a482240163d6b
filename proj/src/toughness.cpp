#include "crackfield/toughness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <spdlog/spdlog.h>

#include "crackfield/errors.hpp"

namespace crackfield {

namespace {

std::string normalized_case(std::string_view id) {
  std::string out;
  for (char c : id) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void ToughnessScenario::validate() const {
  if (!(gamma0 > 0.0)) throw InvalidScenario("gamma0 must be positive");
  for (const Inclusion& inc : inclusions) {
    std::visit(overloaded{
                   [](const Stripe& s) {
                     if (!(s.gamma1 > 0.0)) throw InvalidScenario("stripe gamma1 must be positive");
                     if (!(s.period > 0.0)) throw InvalidScenario("stripe period must be positive");
                     if (!(s.width > 0.0) || s.width > s.period) {
                       throw InvalidScenario("stripe width must lie in (0, period]");
                     }
                   },
                   [](const Disk& d) {
                     if (!(d.gamma1 > 0.0)) throw InvalidScenario("disk gamma1 must be positive");
                     if (!(d.radius >= 0.0)) throw InvalidScenario("disk radius must be non-negative");
                   },
               },
               inc);
  }
}

bool contains(const Inclusion& inc, double x1, double x2) {
  return std::visit(overloaded{
                        [&](const Stripe& s) {
                          const double r = std::fmod(x1 - s.phase, s.period);
                          const double wrapped = r < 0.0 ? r + s.period : r;
                          return wrapped < s.width;
                        },
                        [&](const Disk& d) { return std::hypot(x1 - d.cx, x2 - d.cy) <= d.radius; },
                    },
                    inc);
}

double inclusion_gamma(const Inclusion& inc) {
  return std::visit([](const auto& i) { return i.gamma1; }, inc);
}

ToughnessField rasterize(const ToughnessScenario& s, const GridSpec& g) {
  s.validate();
  for (const Inclusion& inc : s.inclusions) {
    if (const Disk* d = std::get_if<Disk>(&inc)) {
      if (d->cx - d->radius < 0.0 || d->cx + d->radius > g.L || d->cy - d->radius < 0.0 ||
          d->cy + d->radius > g.H) {
        spdlog::warn("disk at ({}, {}) r={} is clipped by the domain", d->cx, d->cy, d->radius);
      }
    }
  }
  ToughnessField field(g, s.gamma0);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      for (const Inclusion& inc : s.inclusions) {
        if (contains(inc, g.x1(i), g.x2(j))) {
          field(i, j) = inclusion_gamma(inc);
          break;
        }
      }
    }
  }
  return field;
}

ToughnessScenario preset(std::string_view case_id) {
  const std::string id = normalized_case(case_id);
  ToughnessScenario s;
  s.name = id;
  s.gamma0 = 0.5;
  if (id == "I") return s;
  if (id == "II") {
    s.inclusions.push_back(Stripe{1.0, 0.5, 0.5, 0.75});
    return s;
  }
  if (id == "III") {
    s.inclusions.push_back(Disk{1.5, 0.5, 0.2, 0.75});
    return s;
  }
  if (id == "IV") {
    s.inclusions.push_back(Disk{2.0, 0.5, 0.2, 1.0});
    return s;
  }
  if (id == "V") {
    s.inclusions = {Disk{1.5, 0.5, 0.2, 0.75}, Disk{3.5, 0.5, 0.2, 0.75}};
    return s;
  }
  if (id == "VI") {
    s.inclusions = {Disk{1.5, 0.65, 0.2, 0.75}, Disk{3.5, 0.45, 0.2, 0.75}};
    return s;
  }
  if (id == "VII") {
    s.inclusions = {Disk{1.5, 0.65, 0.2, 0.75}, Disk{3.0, 0.45, 0.2, 0.75}};
    return s;
  }
  throw UnknownCase("unknown toughness case '" + std::string(case_id) + "'");
}

double preset_default_A(std::string_view case_id) {
  const std::string id = normalized_case(case_id);
  if (id == "I" || id == "II" || id == "III" || id == "IV") return 1.25;
  if (id == "V" || id == "VI" || id == "VII") return 1.0;
  throw UnknownCase("unknown toughness case '" + std::string(case_id) + "'");
}

std::vector<std::pair<double, double>> inclusion_bands(const ToughnessScenario& s, double y,
                                                       double L) {
  std::vector<std::pair<double, double>> bands;
  for (const Inclusion& inc : s.inclusions) {
    if (const Disk* d = std::get_if<Disk>(&inc)) {
      const double dy = y - d->cy;
      if (std::abs(dy) > d->radius) continue;
      const double half = std::sqrt(d->radius * d->radius - dy * dy);
      bands.emplace_back(std::max(0.0, d->cx - half), std::min(L, d->cx + half));
    } else {
      const Stripe& st = std::get<Stripe>(inc);
      const double first = st.phase - std::ceil(st.phase / st.period) * st.period;
      for (double a = first; a < L; a += st.period) {
        const double lo = std::max(0.0, a);
        const double hi = std::min(L, a + st.width);
        if (hi > lo) bands.emplace_back(lo, hi);
      }
    }
  }
  std::sort(bands.begin(), bands.end());
  return bands;
}

}  // namespace crackfield
