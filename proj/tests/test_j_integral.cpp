#include <doctest.h>

#include <cmath>
#include <random>

#include "crackfield/errors.hpp"
#include "crackfield/j_integral.hpp"

using namespace crackfield;

namespace {

ScalarField field(const GridSpec& g, double (*f)(double, double)) {
  ScalarField out(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out(i, j) = f(g.x1(i), g.x2(j));
  return out;
}

BoundaryValues boundary(const GridSpec& g, double (*f)(double, double)) {
  BoundaryValues b{std::vector<double>(g.n1), std::vector<double>(g.n1)};
  for (int i = 0; i < g.n1; ++i) {
    b.bottom[i] = f(g.x1(i), 0.0);
    b.top[i] = f(g.x1(i), g.H);
  }
  return b;
}

// Homogeneous run on a reduced grid, shared by the series tests.
const Trajectory& homogeneous_run() {
  static const Trajectory tr = [] {
    SimulationConfig cfg;
    cfg.grid = make_grid(3, 1, 0.02);
    cfg.scenario = preset("I");
    cfg.bc = SurfingBC{1.25, 1.0, 0.5};
    cfg.n_steps = 160;
    return run_simulation(cfg);
  }();
  return tr;
}

JContour contour_at(double x1_left) {
  JContour c;
  c.x1_left = x1_left;
  return c;
}

}  // namespace

TEST_SUITE("j_integral") {
  TEST_CASE("constant displacement gives zero") {
    const GridSpec g = make_grid(2, 1, 0.05);
    auto c = [](double, double) { return 0.7; };
    const ScalarField u = field(g, c);
    const ScalarField z(g);
    const BoundaryValues b = boundary(g, c);
    const JField f{u, z, b};
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Contour) == 0.0);
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Quoted) == 0.0);
    CHECK(std::abs(j_gamma2(f)) < 1e-20);
    CHECK(j_gamma3(f, 0.5) == 0.0);
    CHECK(j_gamma4(f, 0.5) == 0.0);
  }

  TEST_CASE("uniform shear across the contour") {
    const GridSpec g = make_grid(1, 1, 0.05);
    auto shear = [](double, double x2) { return 1.7 * (x2 - 0.5); };
    const ScalarField u = field(g, shear);
    const ScalarField z(g);
    const BoundaryValues b = boundary(g, shear);
    const JField f{u, z, b};
    const double s2 = 1.7 * 1.7;
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Quoted) == doctest::Approx(-s2).epsilon(1e-12));
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Contour) == doctest::Approx(-s2 / 2).epsilon(1e-12));

    // mu scales every part.
    const JField f3{u, z, b, 3.0};
    CHECK(j_gamma1(f3, 0.5, Gamma1Form::Quoted) == doctest::Approx(-3 * s2).epsilon(1e-12));
  }

  TEST_CASE("fully cracked segment carries nothing") {
    const GridSpec g = make_grid(1, 1, 0.05);
    auto shear = [](double x1, double x2) { return x1 * x2 + x2; };
    const ScalarField u = field(g, shear);
    const ScalarField z(g, 1.0);
    const BoundaryValues b = boundary(g, shear);
    const JField f{u, z, b};
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Quoted) == 0.0);
    CHECK(j_gamma1(f, 0.5, Gamma1Form::Contour) == 0.0);
    CHECK(j_gamma3(f, 0.5) == 0.0);
  }

  TEST_CASE("x1-independent displacement gives no boundary contribution") {
    const GridSpec g = make_grid(2, 1, 0.05);
    auto prof = [](double, double x2) { return std::sin(3 * x2); };
    const ScalarField u = field(g, prof);
    const ScalarField z(g);
    const BoundaryValues b = boundary(g, prof);
    const JField f{u, z, b};
    CHECK(j_gamma3(f, 0.5) == 0.0);
    CHECK(j_gamma4(f, 0.5) == 0.0);
  }

  TEST_CASE("manufactured u = x1 x2 on the top boundary") {
    for (double dx : {0.1, 0.05, 0.02}) {
      const GridSpec g = make_grid(1, 1, dx);
      auto prod = [](double x1, double x2) { return x1 * x2; };
      const ScalarField u = field(g, prod);
      const ScalarField z(g);
      const BoundaryValues b = boundary(g, prod);
      const JField f{u, z, b};
      CHECK(boundary_shear_integral(f, Side::Top, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(j_gamma3(f, 0.0) == doctest::Approx(-0.5).epsilon(1e-12));
      // Bottom: du/dx1 = x2 = 0 there.
      CHECK(std::abs(j_gamma4(f, 0.0)) < 1e-14);
    }
  }

  TEST_CASE("zero displacement and zero data give zero parts") {
    const GridSpec g = make_grid(2, 1, 0.05);
    SimState s;
    s.z = ScalarField(g);
    s.u = ScalarField(g);
    const JParts p = j_total(s, contour_at(0.5), SurfingBC{0.0, 1.0, 0.5}, ModelParams{});
    CHECK(p.j1 == 0.0);
    CHECK(p.j2 == 0.0);
    CHECK(p.j3 == 0.0);
    CHECK(p.j4 == 0.0);
    CHECK(p.total == 0.0);
  }

  TEST_CASE("decomposition identity") {
    const GridSpec g = make_grid(2, 1, 0.05);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
      SimState s;
      s.t = U(rng);
      s.z = ScalarField(g);
      s.u = ScalarField(g);
      for (double& v : s.z.values()) v = U(rng);
      for (double& v : s.u.values()) v = 2 * U(rng) - 1;
      const JParts p = j_total(s, contour_at(0.5), SurfingBC{}, ModelParams{});
      CHECK(p.total == p.j1 + p.j2 + p.j3 + p.j4);
      CHECK(p.j2_warning == (std::abs(p.j2) > 0.01 * std::abs(p.total)));
    }
  }

  TEST_CASE("contour validation") {
    const GridSpec g = make_grid(5, 1, 0.01);
    CHECK(contour_at(0.49).face_index(g) == 49);
    CHECK(contour_at(0.69).face_index(g) == 69);
    CHECK_THROWS_AS(contour_at(0.495).validate(g), ValidationError);
    CHECK_THROWS_AS(contour_at(0.0).validate(g), ValidationError);
    CHECK_THROWS_AS(contour_at(5.0).validate(g), ValidationError);
  }

  TEST_CASE("missing or invalid reference") {
    const Trajectory& tr = homogeneous_run();
    CHECK_THROWS_AS(normalized_series(tr, contour_at(0.5), std::nullopt), MissingReference);
    CHECK_THROWS_AS(normalized_series(tr, contour_at(0.5), 0.0), MissingReference);
    JSeriesOptions late;
    late.reference_step = 1000;
    CHECK_THROWS_AS(reference_j(tr, contour_at(0.5), late), MissingReference);
  }

  TEST_CASE("homogeneous series: symmetry, sign, self-normalization, path independence") {
    const Trajectory& tr = homogeneous_run();
    const JContour near = contour_at(0.5), far = contour_at(0.7);
    const double ref = reference_j(tr, near);
    CHECK(ref > 0.0);
    const JSeries s = normalized_series(tr, near, ref);
    REQUIRE(s.valid_end > s.valid_begin + 20);
    CHECK(s.j_ref == ref);
    for (std::size_t k = s.valid_begin; k < s.valid_end; ++k) {
      CHECK(s.total[k] == s.j1[k] + s.j2[k] + s.j3[k] + s.j4[k]);
      CHECK(s.total[k] > 0.0);
      CHECK(s.normalized[k] == doctest::Approx(1.0).epsilon(0.1));
      CHECK(std::abs(s.j3[k] - s.j4[k]) < 1e-8);
      CHECK(s.tip_x1[k] >= near.x1_left + 0.2);
    }

    const ModelParams p;
    for (int step : {120, 140}) {
      const SimState* st = tr.at_step(step);
      REQUIRE(st != nullptr);
      const double a = j_total(*st, near, tr.bc, p).total;
      const double b = j_total(*st, far, tr.bc, p).total;
      CHECK(std::abs(a - b) <= 0.05 * std::abs(a));
    }
  }
}
