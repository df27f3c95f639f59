#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lambdares/logcover.hpp"
#include "lambdares/scatterers.hpp"

using namespace lres;

TEST_SUITE("scatterers") {
  TEST_CASE("radial profiles evaluate by annulus and interpolate samples") {
    const auto v = RadialPotential::piecewise({0.5, 1.0}, {-3.0, 2.0});
    CHECK(v(0.2) == -3.0);
    CHECK(v(0.5) == -3.0);
    CHECK(v(0.7) == 2.0);
    CHECK(v(1.0) == 2.0);
    CHECK(v(1.01) == 0.0);
    CHECK(v.support() == 1.0);
    const auto s = RadialPotential::sampled({0.0, 1.0, 2.0}, {4.0, 2.0, 0.0});
    CHECK(s(0.5) == doctest::Approx(3.0));
    CHECK(s(1.5) == doctest::Approx(1.0));
    CHECK(s(2.5) == 0.0);
    const auto p = RadialPotential::sampled({0.0, 0.5, 1.0, 1.5}, {1.0, 1.0, 0.5, 0.0}, Interpolation::Pchip);
    for (double r = 0.0; r < 1.5; r += 0.01) {
      CHECK(p(r) <= 1.0 + 1e-15);
      CHECK(p(r) >= -1e-15);
      CHECK(p(r + 0.01) <= p(r) + 1e-15);
    }
  }

  TEST_CASE("invalid radial profiles are rejected") {
    CHECK_THROWS_AS(RadialPotential::piecewise({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(RadialPotential::piecewise({1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RadialPotential::piecewise({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(RadialPotential::piecewise({1.0}, {NAN}), std::invalid_argument);
    CHECK_THROWS_AS(RadialPotential::sampled({0.0, 1.0, 2.0}, {1.0, 1.0, 0.0}, Interpolation::Pchip),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiscObstacle(0.0, BoundaryCondition::Dirichlet), std::invalid_argument);
    CHECK_THROWS_AS(DiscObstacle(1.0, BoundaryCondition::Robin, -1.0), std::invalid_argument);
  }

  TEST_CASE("grid potentials need a vanishing boundary layer") {
    std::vector<double> s(16, 0.0);
    s[5] = 1.0;
    CHECK_NOTHROW(Potential2D(4, 1.0, s));
    s[0] = 1.0;
    CHECK_THROWS_AS(Potential2D(4, 1.0, s), std::invalid_argument);
    CHECK_THROWS_AS(Potential2D(4, 1.0, std::vector<double>(15, 0.0)), std::invalid_argument);
  }

  TEST_CASE("snug rasterization keeps the support inside the interior cells") {
    for (int n : {8, 24, 64}) {
      const double b = Potential2D::snug_half_width(1.0, n);
      CHECK(b - 2.0 * b / n >= 1.0);
      CHECK(b - 2.0 * b / n < 1.0 + 1e-8);
      const auto g = Potential2D::rasterize(RadialPotential::step(1.0, -10.0), n, b);
      const double area = std::accumulate(g.samples().begin(), g.samples().end(), 0.0) * g.cell() * g.cell();
      CHECK(area == doctest::Approx(-10.0 * kPi).epsilon(n >= 24 ? 0.01 : 0.05));
      CHECK(mirror_symmetric(g));
      CHECK(sign_class(g) == SignClass::NonPositive);
    }
  }

  TEST_CASE("sign classes and absolute values") {
    CHECK(sign_class(RadialPotential::step(1.0, 3.0)) == SignClass::NonNegative);
    CHECK(sign_class(RadialPotential::step(1.0, -3.0)) == SignClass::NonPositive);
    const auto mixed = RadialPotential::piecewise({0.5, 1.0}, {-3.0, 2.0});
    CHECK(sign_class(mixed) == SignClass::Mixed);
    CHECK(sign_class(absolute(mixed)) == SignClass::NonNegative);
    CHECK(to_string(SignClass::Mixed) == "mixed");
  }

  TEST_CASE("mirror symmetry detects an off-centre bump") {
    std::vector<double> s(36, 0.0);
    s[2 * 6 + 2] = 1.0;
    CHECK_FALSE(mirror_symmetric(Potential2D(6, 1.0, s)));
    s[3 * 6 + 3] = 1.0;
    CHECK(mirror_symmetric(Potential2D(6, 1.0, s)));
  }

  TEST_CASE("config parsing round trips and rejects bad input") {
    const auto disc = parse_scatterer(R"({"kind":"disc","radius":2,"condition":"robin","robin":0.5})");
    const auto& d = std::get<DiscObstacle>(disc);
    CHECK(d.radius == 2.0);
    CHECK(d.condition == BoundaryCondition::Robin);
    CHECK(d.robin == 0.5);
    CHECK(support_radius(disc) == 2.0);

    const auto well = parse_scatterer(R"({"kind":"radial","breakpoints":[1],"values":[-10]})");
    CHECK(describe(well) == "radial-piecewise(a=1,annuli=1,V=-10)");
    CHECK(scatterer_to_json(parse_scatterer(scatterer_to_json(well))) == scatterer_to_json(well));

    const auto grid = parse_scatterer(R"({"kind":"grid","n":3,"half_width":1,"samples":[0,0,0,0,2,0,0,0,0]})");
    CHECK(std::get<Potential2D>(grid).at(1, 1) == 2.0);

    CHECK_THROWS_AS(parse_scatterer("{"), ConfigError);
    CHECK_THROWS_AS(parse_scatterer("[]"), ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"cube"})"), ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"disc","radius":1})"), ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"disc","radius":1,"condition":"dirichlet","robin":1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"disc","radius":1,"condition":"dirichlet","colour":1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"radial","breakpoints":[1],"values":["x"]})"), ConfigError);
    CHECK_THROWS_AS(parse_scatterer(R"({"kind":"radial","breakpoints":[2,1],"values":[1,1]})"), ConfigError);
    CHECK_THROWS_AS(load_scatterer("/nonexistent/config.json"), ConfigError);
  }
}
