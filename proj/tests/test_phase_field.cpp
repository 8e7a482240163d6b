#include <doctest.h>

#include <cmath>
#include <random>

#include "crackfield/elasticity.hpp"
#include "crackfield/errors.hpp"
#include "crackfield/phase_field.hpp"

using namespace crackfield;

namespace {

ModelParams params(Variant v) {
  ModelParams p;
  p.variant = v;
  return p;
}

SimulationConfig small_run(const char* scenario, Variant v, int n_steps) {
  SimulationConfig cfg;
  cfg.grid = make_grid(2, 1, 0.02);
  cfg.scenario = preset(scenario);
  cfg.params = params(v);
  cfg.bc = SurfingBC{1.25, 1.0, 0.5};
  cfg.n_steps = n_steps;
  return cfg;
}

// A drive field that cracks a band around the midline on the left and
// vanishes on the right.
ScalarField synthetic_drive(const GridSpec& g) {
  ScalarField G(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double r = std::abs(g.x2(j) - 0.5);
      G(i, j) = g.x1(i) < 0.6 ? 400.0 * std::exp(-r / 0.05) : 0.0;
    }
  return G;
}

}  // namespace

TEST_SUITE("phase_field") {
  TEST_CASE("pre-plus right-hand side examples") {
    const GridSpec g = make_grid(1, 1, 0.05);
    const ScalarField zero(g);
    const ToughnessField gamma(g, 0.5);

    const RhsField r2 = rhs_pre_plus(zero, zero, gamma, params(Variant::AT2));
    CHECK(r2.min() == 0.0);
    CHECK(r2.max() == 0.0);

    const RhsField r1 = rhs_pre_plus(zero, zero, gamma, params(Variant::AT1));
    for (double v : r1.values()) CHECK(v == doctest::Approx(-9.375).epsilon(1e-14));

    const double c = 0.3;
    const RhsField rc = rhs_pre_plus(ScalarField(g, c), zero, gamma, params(Variant::AT2));
    for (double v : rc.values()) CHECK(v == doctest::Approx(-(0.5 / 0.02) * c).epsilon(1e-12));

    // Drive term alone: mu G (1 - z).
    const RhsField rd = rhs_pre_plus(ScalarField(g, 0.25), ScalarField(g, 2.0), ToughnessField(g, 0.0),
                                     params(Variant::AT2));
    for (double v : rd.values()) CHECK(v == doctest::Approx(1.5).epsilon(1e-14));
  }

  TEST_CASE("diffusion uses arithmetic-mean face toughness with zero flux") {
    const GridSpec g = make_grid(1, 1, 0.1);
    ScalarField z(g);
    ToughnessField gamma(g, 0.5);
    const int i = 4, j = 5;
    z(i, j) = 1.0;
    gamma(i + 1, j) = 1.5;
    ModelParams p = params(Variant::AT2);
    const RhsField r = rhs_pre_plus(z, ScalarField(g), gamma, p);
    // Faces: three at 0.5, one at (0.5 + 1.5)/2 = 1.0.
    const double div = -(3 * 0.5 + 1.0) / (g.dx * g.dx);
    CHECK(r(i, j) == doctest::Approx(p.epsilon * div - 0.5 / p.epsilon).epsilon(1e-12));
    CHECK(r(i + 1, j) == doctest::Approx(p.epsilon * 1.0 / (g.dx * g.dx)).epsilon(1e-12));

    // Total diffusion of any field sums to zero.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    for (double& v : z.values()) v = U(rng);
    for (double& v : gamma.values()) v = 0.5 + U(rng);
    p.epsilon = 1.0;
    const RhsField rr = rhs_pre_plus(z, ScalarField(g), gamma, p);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.cell_count(); ++k) sum += rr[k] + gamma[k] * z[k];
    CHECK(std::abs(sum) < 1e-9);
  }

  TEST_CASE("zero state stays zero for both variants") {
    const GridSpec g = make_grid(1, 1, 0.05);
    const ToughnessField gamma(g, 0.5);
    for (Variant v : {Variant::AT1, Variant::AT2}) {
      const ScalarField z = update_crack(ScalarField(g), ScalarField(g), gamma, params(v), {1e-12, 0});
      CHECK(z.min() == 0.0);
      CHECK(z.max() == 0.0);
    }
  }

  TEST_CASE("step keeps z irreversible and bounded") {
    for (Variant v : {Variant::AT1, Variant::AT2}) {
      const SimulationConfig cfg = small_run("III", v, 0);
      const ToughnessField gamma = rasterize(cfg.scenario, cfg.grid);
      SimState s;
      s.z = initial_crack(cfg.grid, cfg.params, cfg.notch_length);
      s.u = ScalarField(cfg.grid);
      for (int n = 0; n < 30; ++n) {
        const SimState next = step(s, gamma, cfg.params, cfg.bc);
        for (std::size_t k = 0; k < next.z.size(); ++k) REQUIRE(next.z[k] >= s.z[k]);
        CHECK(next.z.min() >= 0.0);
        CHECK(next.z.max() <= 1.0);
        CHECK(next.step == n + 1);
        CHECK(next.t == doctest::Approx((n + 1) * cfg.params.dt).epsilon(1e-12));
        s = next;
      }
    }
  }

  TEST_CASE("tip tracking") {
    const GridSpec g = make_grid(2, 1, 0.05);
    ScalarField z(g);
    const int row = 7;
    int last = 0;
    for (int i = 0; i < g.n1 && g.x1(i) <= 1.0; ++i) {
      z(i, row) = 1.0;
      last = i;
    }
    const TipPosition tip = track_tip(z);
    CHECK(tip.x1 == g.x1(last));
    CHECK(tip.x2 == g.x2(row));

    // Weighted centroid over the tip column.
    z(last, row + 1) = 0.6;
    const TipPosition w = track_tip(z);
    CHECK(w.x2 == doctest::Approx((1.0 * g.x2(row) + 0.6 * g.x2(row + 1)) / 1.6).epsilon(1e-14));

    // Two branches: the tip sits on one of them, never between.
    ScalarField b(g);
    for (int i = 0; i <= 20; ++i) {
      b(i, 3) = b(i, 16) = 1.0;
    }
    CHECK(track_tip(b).x2 == g.x2(3));
    b(20, 17) = 0.8;
    CHECK(track_tip(b).x2 == doctest::Approx((g.x2(16) + 0.8 * g.x2(17)) / 1.8).epsilon(1e-14));

    CHECK_THROWS_AS(track_tip(ScalarField(g, 0.49)), NoCrack);
  }

  TEST_CASE("initial notch profile") {
    const GridSpec g = make_grid(2, 1, 0.01);
    for (Variant v : {Variant::AT1, Variant::AT2}) {
      const ModelParams p = params(v);
      const ScalarField z = initial_crack(g, p, 0.25);
      CHECK(z(g.nearest_i(0.1), g.n2 / 2) == 1.0);
      CHECK(z(g.nearest_i(0.1), g.n2 / 2 - 1) == 1.0);
      CHECK(z.max() <= 1.0);
      CHECK(z.min() >= 0.0);
    }
    CHECK(notch_profile(Variant::AT1, 0.02, 0.0) == 1.0);
    CHECK(notch_profile(Variant::AT2, 0.02, 0.0) == 1.0);
    CHECK(notch_profile(Variant::AT1, 0.02, 0.04) == 0.0);
    CHECK(notch_profile(Variant::AT1, 0.02, 0.08) == 0.0);
    CHECK(notch_profile(Variant::AT2, 0.02, 0.02) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

    // Zero half-width: distance is measured to the segment itself.
    const ModelParams p = params(Variant::AT2);
    const ScalarField thin = initial_crack(g, p, 0.25, 0.0);
    const int i = g.nearest_i(0.1);
    const int j = g.n2 / 2;
    CHECK(thin(i, j) == doctest::Approx(std::exp(-(g.x2(j) - 0.5) / p.epsilon)).epsilon(1e-12));
    // Beyond the notch end distance is radial.
    const int ie = g.nearest_i(0.305);
    const double d = std::hypot(g.x1(ie) - 0.25, g.x2(j) - 0.5);
    CHECK(thin(ie, j) == doctest::Approx(std::exp(-d / p.epsilon)).epsilon(1e-12));
  }

  TEST_CASE("plus-operator consistency of the crack update") {
    // Cells left unchanged carry a non-positive driving force; active cells
    // satisfy the semi-implicit equation.
    const GridSpec g = make_grid(1, 1, 0.02);
    const ToughnessField gamma(g, 0.5);
    for (Variant v : {Variant::AT1, Variant::AT2}) {
      const ModelParams p = params(v);
      ScalarField z0 = initial_crack(g, p, 0.25);
      // A damaged patch with no drive, which wants to heal.
      for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
          if (g.x1(i) > 0.7) z0(i, j) = std::max(z0(i, j), 0.3);
      const ScalarField G = synthetic_drive(g);
      const ScalarField z1 = update_crack(z0, G, gamma, p, {1e-13, 0});
      const RhsField r = rhs_pre_plus(z1, G, gamma, p);
      auto inactive = [&](int i, int j) { return z1(i, j) == z0(i, j) && z0(i, j) < 1.0; };
      int active = 0, idle = 0;
      double worst_inactive = -1e300, worst_active = 0.0;
      for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
          if (inactive(i, j)) worst_inactive = std::max(worst_inactive, r(i, j));
          idle += inactive(i, j);
          if (z1(i, j) > z0(i, j) && z1(i, j) < 1.0) {
            ++active;
            worst_active =
                std::max(worst_active, std::abs(p.alpha2 * (z1(i, j) - z0(i, j)) / p.dt - r(i, j)));
          }
        }
      MESSAGE(to_string(v) << ": active " << active << ", inactive " << idle << ", worst inactive rhs "
                           << worst_inactive << ", worst active residual " << worst_active);
      CHECK(active > 0);
      CHECK(idle > 0);
      CHECK(worst_inactive <= 1e-6);
      CHECK(worst_active <= 1e-6);
    }
  }

  TEST_CASE("frozen-drive crack update does not increase the discrete energy") {
    const GridSpec g = make_grid(1, 1, 0.02);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    ToughnessField gamma(g, 0.5);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i)
        if (std::hypot(g.x1(i) - 0.7, g.x2(j) - 0.5) < 0.15) gamma(i, j) = 0.75;
    for (Variant v : {Variant::AT1, Variant::AT2}) {
      const ModelParams p = params(v);
      ScalarField z = initial_crack(g, p, 0.25);
      const ScalarField G = synthetic_drive(g);
      double e = discrete_energy(z, G, gamma, p);
      for (int n = 0; n < 10; ++n) {
        z = update_crack(z, G, gamma, p, {1e-13, 0});
        const double next = discrete_energy(z, G, gamma, p);
        CHECK(next <= e + 1e-9 * std::abs(e));
        e = next;
      }
    }
  }

  TEST_CASE("symmetric scenarios keep z symmetric about the midline") {
    for (const char* name : {"I", "III"}) {
      const Trajectory tr = run_simulation(small_run(name, Variant::AT2, 100));
      const GridSpec& g = tr.grid;
      double asym = 0.0;
      for (const SimState& s : tr.snapshots)
        for (int j = 0; j < g.n2; ++j)
          for (int i = 0; i < g.n1; ++i) asym = std::max(asym, std::abs(s.z(i, j) - s.z(i, g.n2 - 1 - j)));
      CHECK(asym < 1e-6);
    }
  }

  TEST_CASE("trajectory bookkeeping and irreversibility across snapshots") {
    SimulationConfig cfg = small_run("II", Variant::AT1, 40);
    cfg.record_every = 4;
    const Trajectory tr = run_simulation(cfg);
    REQUIRE(tr.snapshots.size() == 11);
    CHECK(tr.tip_series.size() == 41);
    for (std::size_t n = 1; n < tr.snapshots.size(); ++n) {
      CHECK(tr.snapshots[n].t > tr.snapshots[n - 1].t);
      CHECK(tr.snapshots[n].step == 4 * static_cast<int>(n));
      for (std::size_t k = 0; k < tr.snapshots[n].z.size(); ++k)
        REQUIRE(tr.snapshots[n].z[k] >= tr.snapshots[n - 1].z[k]);
    }
    CHECK(tr.at_step(8) == &tr.snapshots[2]);
    CHECK(tr.at_step(9) == nullptr);
    REQUIRE(tr.tip_at_step(9) != nullptr);
    CHECK(tr.tip_at_step(9)->step == 9);
    for (std::size_t n = 1; n < tr.tip_series.size(); ++n)
      CHECK(tr.tip_series[n].x1 >= tr.tip_series[n - 1].x1);
  }

  TEST_CASE("solver failure is annotated with the step index") {
    SimulationConfig cfg = small_run("I", Variant::AT2, 3);
    cfg.step.crack = {1e-15, 1};
    try {
      run_simulation(cfg);
      FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
      CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
  }

  TEST_CASE("homogeneous crack at small scale advances along the midline") {
    const Trajectory tr = run_simulation(small_run("I", Variant::AT2, 150));
    const TipSample& end = tr.tip_series.back();
    CHECK(end.x1 > 1.0);
    double dev = 0.0;
    for (const TipSample& s : tr.tip_series) dev = std::max(dev, std::abs(s.x2 - 0.5));
    CHECK(dev < 2 * tr.grid.dy);
  }
}
