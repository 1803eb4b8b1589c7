#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "degparab/regions.hpp"
#include "degparab/solutions.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace degparab;
namespace dt = degparab::testing;

namespace {
EllipticityParams prm(double lambda, double Lambda, double p, int n) {
  return EllipticityParams{lambda, Lambda, p, n};
}

Cylinder past_cyl(std::vector<double> x0, double t0, double rho, double theta) {
  Cylinder c;
  c.x0 = std::move(x0);
  c.t0 = t0;
  c.rho = rho;
  c.theta = theta;
  c.orientation = Cylinder::Orientation::past;
  return c;
}
}  // namespace

TEST_CASE("ellipticity params invariants") {
  CHECK_NOTHROW(prm(1, 2, 3, 2).validate());
  CHECK_THROWS_AS(prm(2, 1, 3, 2).validate(), ValidationError);
  CHECK_THROWS_AS(prm(0, 1, 3, 2).validate(), ValidationError);
  CHECK_THROWS_AS(prm(1, 2, 0.5, 2).validate(), ValidationError);
  CHECK_THROWS_AS(prm(1, 2, 3, 0).validate(), ValidationError);
  CHECK_NOTHROW(prm(1, 2, 1.5, 1).validate());  // contact range
  CHECK_THROWS_AS(prm(1, 2, 1.5, 1).require_degenerate("x"), ValidationError);
}

TEST_CASE("cylinder membership and half-open time conventions") {
  const auto P = prm(1, 2, 3, 1);
  auto c = past_cyl({0.0}, 0.0, 1.0, 1.0);
  const double x0 = 0.0;
  CHECK(cylinder_contains(c, std::span(&x0, 1), 0.0, P));          // t0 included
  CHECK_FALSE(cylinder_contains(c, std::span(&x0, 1), -1.0, P));   // -theta rho^p excluded
  CHECK(cylinder_contains(c, std::span(&x0, 1), -0.999999, P));

  auto c2 = past_cyl({0.0}, 0.0, 2.0, 0.5);  // theta rho^p = 4
  CHECK(cylinder_contains(c2, std::span(&x0, 1), -3.9, P));
  CHECK_FALSE(cylinder_contains(c2, std::span(&x0, 1), -4.0, P));

  // (x0,t0) belongs to both orientations; spatial boundary is open
  auto f = c;
  f.orientation = Cylinder::Orientation::future;
  CHECK(cylinder_contains(f, std::span(&x0, 1), 0.0, P));
  const double edge = 1.0;
  CHECK_FALSE(cylinder_contains(c, std::span(&edge, 1), -0.5, P));

  auto full = c;
  full.orientation = Cylinder::Orientation::full;
  CHECK(cylinder_contains(full, std::span(&x0, 1), 0.5, P));
  CHECK(cylinder_contains(full, std::span(&x0, 1), -0.5, P));
  CHECK_FALSE(cylinder_contains(full, std::span(&x0, 1), 1.0, P));
}

TEST_CASE("region measure approximates volume") {
  const auto P = prm(1, 2, 3, 1);
  const double origin[] = {0.0};
  const double extent[] = {1.2};
  Grid g = Grid::make(origin, extent, 0.01, -1.2, 1.2, 0.01);

  auto full = past_cyl({0.0}, 0.0, 1.0, 1.0);
  full.orientation = Cylinder::Orientation::full;
  const double m = region_measure(full, g, P);  // |B_1| * 2 theta rho^p = 2 * 2
  CHECK(m == doctest::Approx(4.0).epsilon(0.03));

  // region entirely outside the grid
  auto far = past_cyl({100.0}, 0.0, 1.0, 1.0);
  CHECK(region_measure(far, g, P) == 0.0);

  // paraboloid with p = 2: integral of 2 sqrt(t) over (0,1) = 4/3
  const auto P2 = prm(1, 2, 2.0, 1);
  ParaboloidSet b;
  b.x0 = {0.0};
  b.t0 = 0.0;
  b.theta = 1.0;
  b.r = 1.0;
  Grid g2 = Grid::make(origin, extent, 0.005, -0.1, 1.1, 0.005);
  CHECK(region_measure(b, g2, P2) == doctest::Approx(4.0 / 3.0).epsilon(0.03));
}

TEST_CASE("region measure is monotone under inclusion") {
  const auto P = prm(1, 2, 3, 2);
  const double origin[] = {0.0, 0.0};
  const double extent[] = {1.5, 1.5};
  Grid g = Grid::make(origin, extent, 0.05, -1.5, 0.1, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    const double rho = dt::uniform(0.2, 1.0);
    const double theta = dt::uniform(0.2, 1.0);
    auto small = past_cyl({dt::uniform(-0.3, 0.3), dt::uniform(-0.3, 0.3)},
                          dt::uniform(-0.5, 0.0), rho, theta);
    auto big = small;
    big.rho = rho * dt::uniform(1.0, 1.4);
    big.theta = theta * dt::uniform(1.0, 1.4);
    CHECK(region_measure(small, g, P) <= region_measure(big, g, P) + 1e-12);
  }
}

TEST_CASE("theta_from_value") {
  CHECK(theta_from_value(1.0, 1.0, prm(1, 2, 3, 1)) == doctest::Approx(1.0));
  CHECK(theta_from_value(1.0, 2.0, prm(1, 2, 4, 1)) == doctest::Approx(0.25));
  CHECK(theta_from_value(0.5, 0.5, prm(1, 2, 3, 1)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(theta_from_value(1.0, 0.0, prm(1, 2, 3, 1)), ValidationError);
  CHECK_THROWS_AS(theta_from_value(1.0, -1.0, prm(1, 2, 3, 1)), ValidationError);
  for (int i = 0; i < 50; ++i) {
    const double c = dt::uniform(1e-3, 1e3);
    CHECK(theta_from_value(c, c, prm(1, 2, dt::uniform(2.1, 6.0), 1)) == doctest::Approx(1.0));
  }
}

TEST_CASE("intrinsic rescale identity and constants") {
  const auto P = prm(1, 2, 3, 1);
  const double origin[] = {0.0};
  const double extent[] = {1.0};
  Grid g = Grid::make(origin, extent, 0.125, 0.0, 1.0, 0.125);
  ScalarField u = ScalarField::sample(g, [](std::span<const double>, double) { return 2.0; });

  ScalarField id = intrinsic_rescale(u, 1.0, 1.0, P);
  CHECK(id.values == u.values);
  CHECK(id.grid.dx == u.grid.dx);

  ScalarField half = intrinsic_rescale(u, 1.0, 2.0, P);
  for (double v : half.values) CHECK(v == doctest::Approx(1.0));
  CHECK(half.grid.dt == doctest::Approx(u.grid.dt * 2.0));  // M^(p-2)/r^p = 2
}

TEST_CASE("intrinsic rescale matches the closed-form pullback") {
  const auto P = prm(1, 2, 3, 1);
  Barenblatt phi(P);
  const double origin[] = {0.0};
  const double extent[] = {2.0};
  Grid g = Grid::make(origin, extent, 0.0625, 1.0, 2.0, 0.0625);
  ScalarField u = sample_solution(phi, g);
  ScalarField v = intrinsic_rescale(u, 2.0, 1.0, P);
  std::vector<double> x(1);
  for (int k = 0; k < v.grid.nt; ++k)
    for (long j = 0; j < v.spatial_size(); ++j) {
      v.grid.node_coords(j, x);
      const double mapped[] = {2.0 * x[0]};
      const double expect = phi.value(mapped, 8.0 * v.grid.time(k));
      CHECK(std::abs(v.at(j, k) - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("intrinsic rescale composes") {
  const auto P = prm(1, 2, 3, 1);
  const double origin[] = {0.0};
  const double extent[] = {1.0};
  Grid g = Grid::make(origin, extent, 0.25, 0.5, 1.5, 0.25);
  ScalarField u = ScalarField::sample(
      g, [](std::span<const double> x, double t) { return std::sin(x[0]) + t; });
  ScalarField a = intrinsic_rescale(intrinsic_rescale(u, 2.0, 3.0, P), 0.5, 0.5, P);
  ScalarField b = intrinsic_rescale(u, 1.0, 1.5, P);
  REQUIRE(a.values.size() == b.values.size());
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
  CHECK(a.grid.dt == doctest::Approx(b.grid.dt).epsilon(1e-12));
  CHECK(a.grid.dx == doctest::Approx(b.grid.dx).epsilon(1e-12));
}

TEST_CASE("rescale onto a grid rejects off-node factors unless interpolating") {
  const auto P = prm(1, 2, 3, 1);
  const double origin[] = {0.0};
  const double extent[] = {1.0};
  Grid g = Grid::make(origin, extent, 0.25, 0.0, 1.0, 0.25);
  ScalarField u = ScalarField::sample(
      g, [](std::span<const double> x, double t) { return x[0] + t; });

  // r = 2 maps the half-size grid exactly onto source nodes
  const double ex2[] = {0.5};
  Grid target = Grid::make(origin, ex2, 0.125, 0.0, 0.125, 0.03125);
  CHECK_NOTHROW(intrinsic_rescale_onto(u, 2.0, 1.0, P, target));

  // r = 3: times land on slices (dt = 1/108 -> source quarters) but the
  // spatial nodes at odd multiples of 0.125 map off-node
  const double ex3[] = {0.25};
  Grid bad = Grid::make(origin, ex3, 0.125, 0.0, 1.0 / 27.0, 1.0 / 108.0);
  CHECK_THROWS_AS(intrinsic_rescale_onto(u, 3.0, 1.0, P, bad), ValidationError);
  CHECK_NOTHROW(intrinsic_rescale_onto(u, 3.0, 1.0, P, bad, true));
}

TEST_CASE("field binary round-trip and node lookup") {
  const double origin[] = {0.25, -0.5};
  const double extent[] = {1.0, 0.75};
  Grid g = Grid::make(origin, extent, 0.25, -1.0, 0.0, 0.5);
  ScalarField u = ScalarField::sample(
      g, [](std::span<const double> x, double t) { return x[0] * 7.0 - x[1] + 3.0 * t; });

  const auto path = std::filesystem::temp_directory_path() / "degparab_roundtrip.fld";
  u.write_binary(path.string());
  ScalarField v = ScalarField::read_binary(path.string());
  CHECK(v.values == u.values);
  CHECK(v.grid.nx == u.grid.nx);
  CHECK(v.grid.dx == u.grid.dx);
  CHECK(v.grid.t_start == u.grid.t_start);
  std::filesystem::remove(path);

  const double pt[] = {0.5, -0.25};
  CHECK(u.value_at_point(pt, -0.5) == doctest::Approx(0.5 * 7.0 + 0.25 - 1.5));
  const double off[] = {0.51, -0.25};
  CHECK_THROWS_AS(u.value_at_point(off, -0.5), ValidationError);
}

TEST_CASE("grid validation") {
  const double origin[] = {0.0};
  const double extent[] = {0.1};
  CHECK_THROWS_AS(Grid::make(origin, extent, 0.2, 0.0, 1.0, 0.1), ValidationError);  // < 3 nodes
  CHECK_THROWS_AS(Grid::make(origin, extent, 0.05, 1.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(Grid::make(origin, extent, -0.1, 0.0, 1.0, 0.1), ValidationError);
}
