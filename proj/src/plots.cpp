#include "crackfield/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crackfield/errors.hpp"
#include "crackfield/toughness.hpp"

namespace crackfield {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* color(int c) { return kPalette[c % 8]; }

// Axes box with a linear data-to-pixel map.
class Figure {
public:
  Figure(double width, double height, double x0, double x1, double y0, double y1)
      : w_(width), h_(height), x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) y1_ = y0_ + 1.0;
    out_ = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w_ + kLeft + kRight, h_ + kTop + kBottom, w_ + kLeft + kRight, h_ + kTop + kBottom);
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * w_; }
  double py(double y) const { return kTop + (y1_ - y) / (y1_ - y0_) * h_; }

  void raw(const std::string& s) { out_ += s; }

  void rect(double xa, double ya, double xb, double yb, const std::string& style) {
    const double l = px(std::min(xa, xb)), r = px(std::max(xa, xb));
    const double t = py(std::max(ya, yb)), b = py(std::min(ya, yb));
    out_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" {}/>\n",
                        l, t, r - l, b - t, style);
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& style, std::size_t begin = 0,
                std::size_t end = std::numeric_limits<std::size_t>::max()) {
    end = std::min(end, xs.size());
    if (end <= begin) return;
    out_ += "<polyline fill=\"none\" " + style + " points=\"";
    for (std::size_t k = begin; k < end; ++k) {
      out_ += fmt::format("{:.2f},{:.2f} ", px(xs[k]), py(ys[k]));
    }
    out_ += "\"/>\n";
  }

  void line(double xa, double ya, double xb, double yb, const std::string& style) {
    out_ += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" {}/>\n",
                        px(xa), py(ya), px(xb), py(yb), style);
  }

  void dot(double x, double y, double r, const char* fill) {
    out_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{}\" fill=\"{}\"/>\n", px(x),
                        py(y), r, fill);
  }

  void text(double x_px, double y_px, const std::string& s, const char* anchor = "middle") {
    out_ += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"{}\">{}</text>\n", x_px,
                        y_px, anchor, s);
  }

  void axes(const std::string& xlabel, const std::string& ylabel, const std::string& title) {
    out_ += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"none\" "
        "stroke=\"black\"/>\n",
        kLeft, kTop, w_, h_);
    for (int k = 0; k <= 4; ++k) {
      const double x = x0_ + (x1_ - x0_) * k / 4.0;
      const double y = y0_ + (y1_ - y0_) * k / 4.0;
      out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                          "stroke=\"black\"/>\n",
                          px(x), kTop + h_, kTop + h_ + 5);
      text(px(x), kTop + h_ + 18, fmt::format("{:.3g}", x));
      out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
                          "stroke=\"black\"/>\n",
                          kLeft - 5.0, py(y), kLeft);
      text(kLeft - 8, py(y) + 4, fmt::format("{:.3g}", y), "end");
    }
    text(kLeft + w_ / 2, kTop + h_ + 36, xlabel);
    out_ += fmt::format(
        "<text x=\"14\" y=\"{0:.1f}\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 14 {0:.1f})\">{1}</text>\n",
        kTop + h_ / 2, ylabel);
    text(kLeft + w_ / 2, kTop - 10, title);
  }

  std::string finish() { return out_ + "</svg>\n"; }

private:
  static constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
  double w_, h_, x0_, x1_, y0_, y1_;
  std::string out_;
};

void outline_inclusions(Figure& fig, const ToughnessScenario& s, double L, double H) {
  const std::string style = "fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.2\"";
  for (const Inclusion& inc : s.inclusions) {
    if (const auto* d = std::get_if<Disk>(&inc)) {
      const double r = fig.px(d->cx + d->radius) - fig.px(d->cx);
      fig.raw(fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" {}/>\n",
                          fig.px(d->cx), fig.py(d->cy), r, style));
    }
  }
  for (const auto& [a, b] : inclusion_bands(s, 0.5 * H, L)) {
    bool stripe = false;
    for (const Inclusion& inc : s.inclusions) stripe = stripe || std::holds_alternative<Stripe>(inc);
    if (stripe) fig.rect(a, 0.0, b, H, style);
  }
}

}  // namespace

std::string svg_crack_field(const Trajectory& traj) {
  const GridSpec& g = traj.grid;
  const double scale = 800.0 / g.L;
  Figure fig(800.0, g.H * scale, 0.0, g.L, 0.0, g.H);
  if (!traj.snapshots.empty()) {
    const SimState& s = traj.snapshots.back();
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const double z = s.z(i, j);
        if (z < 0.02) continue;
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(z, 0.0, 1.0))));
        fig.rect(i * g.dx, j * g.dy, (i + 1) * g.dx, (j + 1) * g.dy,
                 fmt::format("fill=\"rgb({0},{0},{0})\"", shade));
      }
    outline_inclusions(fig, traj.scenario, g.L, g.H);
    fig.axes("x1", "x2", fmt::format("crack field z at t = {:.3g}", s.t));
  } else {
    fig.axes("x1", "x2", "crack field (no snapshots)");
  }
  return fig.finish();
}

std::string svg_tip_position(const Trajectory& traj) {
  std::vector<double> t, x;
  for (const TipSample& s : traj.tip_series) {
    t.push_back(s.t);
    x.push_back(s.x1);
  }
  const double tmax = t.empty() ? 1.0 : t.back();
  Figure fig(640, 400, 0.0, tmax, 0.0, traj.grid.L);
  for (const auto& [a, b] : inclusion_bands(traj.scenario, 0.5 * traj.grid.H, traj.grid.L)) {
    fig.rect(0.0, a, tmax, b, "fill=\"#f4c7c3\"");
  }
  fig.polyline(t, x, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
  fig.axes("t", "tip x1", "crack tip position");
  return fig.finish();
}

std::string svg_j_series(const JSeries& j) {
  double lo = 0.0, hi = 1.0;
  for (double v : j.normalized) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double t0 = j.times.empty() ? 0.0 : j.times.front();
  const double t1 = j.times.empty() ? 1.0 : j.times.back();
  Figure fig(640, 400, t0, t1, lo, hi * 1.05);
  fig.line(t0, 1.0, t1, 1.0, "stroke=\"#999\" stroke-dasharray=\"4 3\"");
  fig.polyline(j.times, j.normalized, "stroke=\"#aaa\" stroke-width=\"1\"");
  fig.polyline(j.times, j.normalized, "stroke=\"#1f77b4\" stroke-width=\"1.8\"", j.valid_begin,
               j.valid_end);
  fig.axes("t", "J / J_ref", "normalized J-integral");
  return fig.finish();
}

std::string svg_xy_scatter(const EstimationReport& rep) {
  double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
  for (const XYPoint& p : rep.points) {
    xlo = std::min(xlo, p.X);
    xhi = std::max(xhi, p.X);
    ylo = std::min(ylo, p.Y);
    yhi = std::max(yhi, p.Y);
  }
  Figure fig(560, 420, xlo, xhi, ylo, yhi);
  const std::size_t stride = std::max<std::size_t>(1, rep.points.size() / 6000);
  for (std::size_t n = 0; n < rep.points.size(); n += stride) {
    const XYPoint& p = rep.points[n];
    fig.dot(p.X, p.Y, 1.6, color(p.class_label.value_or(0)));
  }
  for (std::size_t m = 0; m < rep.gamma_hat.size(); ++m) {
    const double g = rep.gamma_hat[m];
    fig.line(xlo, g * xlo, xhi, g * xhi,
             fmt::format("stroke=\"{}\" stroke-width=\"1.5\"", color(static_cast<int>(m))));
    fig.text(fig.px(xlo) + 10, 50 + 16.0 * static_cast<double>(m),
             fmt::format("class {}: gamma = {:.4f}", m, g), "start");
  }
  fig.axes("X", "Y", "slope classes");
  return fig.finish();
}

std::string svg_class_map(const EstimationReport& rep, double L, double H) {
  const double scale = 800.0 / L;
  Figure fig(800, H * scale, 0.0, L, 0.0, H);
  for (std::size_t m = 0; m < rep.spatial_map.size(); ++m) {
    const auto& pts = rep.spatial_map[m];
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 4000);
    for (std::size_t n = 0; n < pts.size(); n += stride) {
      fig.dot(pts[n][0], pts[n][1], 1.4, color(static_cast<int>(m)));
    }
  }
  fig.axes("x1", "x2", "sample classes in the domain");
  return fig.finish();
}

std::vector<std::string> emit_plots(const PlotArtifacts& a, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto save = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::trunc);
    if (!out || !(out << body)) throw IoError("cannot write " + path);
    written.push_back(path);
  };
  if (a.trajectory) {
    save("crack_field.svg", svg_crack_field(*a.trajectory));
    save("tip_position.svg", svg_tip_position(*a.trajectory));
  }
  if (a.j) {
    if (a.j->size() == 0) {
      spdlog::warn("J series is empty; no J plot written");
    } else {
      save("j_integral.svg", svg_j_series(*a.j));
    }
  }
  if (a.estimate) {
    save("xy_scatter.svg", svg_xy_scatter(*a.estimate));
    const double L = a.trajectory ? a.trajectory->grid.L : 5.0;
    const double H = a.trajectory ? a.trajectory->grid.H : 1.0;
    save("class_map.svg", svg_class_map(*a.estimate, L, H));
  }
  return written;
}

}  // namespace crackfield
