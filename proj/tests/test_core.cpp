#include <doctest.h>

#include <cmath>
#include <random>

#include "crackfield/errors.hpp"
#include "crackfield/grid.hpp"
#include "crackfield/model.hpp"

using namespace crackfield;

TEST_SUITE("core") {
  TEST_CASE("make_grid divides the domain into square cells") {
    const GridSpec g = make_grid(5, 1, 0.01);
    CHECK(g.n1 == 500);
    CHECK(g.n2 == 100);
    CHECK(g.dy == g.dx);

    const GridSpec tiny = make_grid(1, 1, 0.5);
    CHECK(tiny.n1 == 2);
    CHECK(tiny.n2 == 2);
    // Accepted as a description, rejected for computation.
    CHECK_THROWS_AS(validate(tiny), std::invalid_argument);

    CHECK_THROWS_AS(make_grid(5, 1, 0.3), NonIntegralDivision);
    CHECK_THROWS_AS(make_grid(5, 1, 0.0), std::invalid_argument);
  }

  TEST_CASE("surfing displacement values") {
    const SurfingBC bc{1.25, 1.0, 0.5};
    const double t = 0.7;
    CHECK(surfing_displacement(bc, bc.v * t, 0.9, 1.0, t) == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(surfing_displacement(bc, bc.v * t, 0.1, 1.0, t) == doctest::Approx(-0.625).epsilon(1e-15));
    CHECK(surfing_displacement(bc, 1.0, 0.5, 1.0, t) == 0.0);

    const SurfingBC unit{1.0, 1.0, 0.5};
    CHECK(std::abs(surfing_displacement(unit, 2.0 - 10 * unit.d, 0.9, 1.0, 2.0) - 1.0) < 1e-8);
  }

  TEST_CASE("surfing displacement is odd about the midline and non-increasing in x1 above it") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const SurfingBC bc{1.25, 1.0, 0.5};
    for (int n = 0; n < 200; ++n) {
      const double x1 = 5 * U(rng), s = 0.5 * U(rng), t = 3 * U(rng);
      CHECK(surfing_displacement(bc, x1, 0.5 + s, 1.0, t) ==
            -surfing_displacement(bc, x1, 0.5 - s, 1.0, t));
      const double x2 = 0.5 + 0.5 * U(rng) + 1e-9;
      const double dx = 0.1 * U(rng);
      CHECK(surfing_displacement(bc, x1 + dx, x2, 1.0, t) <=
            surfing_displacement(bc, x1, x2, 1.0, t));
    }
  }

  TEST_CASE("bilinear sampling") {
    const GridSpec g = make_grid(1, 1, 0.125);
    const ScalarField c(g, 3.25);
    CHECK(bilinear_sample(c, 0.3, 0.71) == doctest::Approx(3.25));

    ScalarField xs(g);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) xs(i, j) = g.x1(i);
    CHECK(bilinear_sample(xs, g.x1(3), g.x2(5)) == doctest::Approx(g.x1(3)));

    // Midpoint of four centers: average of the four values.
    ScalarField f(g);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) f(i, j) = 2.0 * g.x1(i) - 3.0 * g.x2(j) + 0.5;
    const double mid = bilinear_sample(f, 0.5 * (g.x1(2) + g.x1(3)), 0.5 * (g.x2(4) + g.x2(5)));
    const double avg = 0.25 * (f(2, 4) + f(3, 4) + f(2, 5) + f(3, 5));
    CHECK(mid == doctest::Approx(avg).epsilon(1e-14));
  }

  TEST_CASE("bilinear sampling reproduces affine fields") {
    const GridSpec g = make_grid(2, 1, 0.05);
    ScalarField f(g);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) f(i, j) = 0.3 * g.x1(i) + 1.7 * g.x2(j) - 0.2;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> X(g.x1(0), g.x1(g.n1 - 1));
    std::uniform_real_distribution<double> Y(g.x2(0), g.x2(g.n2 - 1));
    for (int n = 0; n < 500; ++n) {
      const double a = X(rng), b = Y(rng);
      CHECK(std::abs(bilinear_sample(f, a, b) - (0.3 * a + 1.7 * b - 0.2)) < 1e-12);
    }
  }

  TEST_CASE("model parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ModelParams{};
    p.alpha2 = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    SurfingBC bc;
    bc.d = 0.0;
    CHECK_THROWS_AS(bc.validate(), ValidationError);
  }
}
