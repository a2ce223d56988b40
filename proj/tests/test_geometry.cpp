#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manneal/errors.hpp"
#include "manneal/geometry.hpp"

using namespace manneal;

namespace {
constexpr double kPi = std::numbers::pi;

TangentVector tangent(const ManifoldPoint& base, double a, double b = 0.0) {
  TangentVector v;
  v.base = base;
  v.components = {a, b};
  return v;
}
}  // namespace

TEST_CASE("exp_map chart cases") {
  auto p = exp_map(circle_point(0.0), tangent(circle_point(0.0), kPi / 2));
  CHECK(p.coords[0] == doctest::Approx(kPi / 2).epsilon(1e-12));

  auto q = exp_map(torus_point(0.0, 0.0), tangent(torus_point(0.0, 0.0), 2 * kPi, 0.0));
  CHECK(q.coords[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(q.coords[1] == doctest::Approx(0.0).epsilon(1e-9));

  auto north = sphere_point(0.0, 0.0, 1.0);
  auto south = exp_map(north, tangent(north, kPi, 0.0));
  CHECK(south.coords[2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("log_map chart cases") {
  auto x = circle_point(0.3);
  auto v = log_map(x, x);
  CHECK(v.components[0] == 0.0);

  auto w = log_map(circle_point(0.0), circle_point(kPi / 2));
  CHECK(w.components[0] == doctest::Approx(kPi / 2).epsilon(1e-12));

  // Point at colatitude 1 on the phi=0 meridian, seen from the north pole.
  auto north = sphere_point(0.0, 0.0, 1.0);
  auto y = sphere_point(std::sin(1.0), 0.0, std::cos(1.0));
  auto u = log_map(north, y);
  double n = std::hypot(u.components[0], u.components[1]);
  CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log_map rejects cut-locus pairs") {
  CHECK_THROWS_AS((void)log_map(circle_point(0.0), circle_point(kPi)), CutLocusError);
  CHECK_THROWS_AS(
      (void)log_map(sphere_point(0, 0, 1), sphere_point(0, 0, -1)), CutLocusError);
  CHECK_THROWS_AS(
      (void)log_map(torus_point(0, 0), torus_point(kPi, 0.5)), CutLocusError);
}

TEST_CASE("dist basics") {
  CHECK(dist(circle_point(0.0), circle_point(3 * kPi / 2)) ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(dist(sphere_point(0, 0, 1), sphere_point(0, 0, -1)) ==
        doctest::Approx(kPi).epsilon(1e-12));
  CHECK(dist(torus_point(0, 0), torus_point(kPi, kPi)) ==
        doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-12));
  CHECK_THROWS_AS((void)dist(circle_point(0), torus_point(0, 0)), std::invalid_argument);
}

TEST_CASE("exp and log invert each other") {
  RandomStream rng(2024, 0);
  auto random_point = [&](Manifold m) {
    switch (m) {
      case Manifold::Circle: return circle_point(2 * kPi * rng.uniform01());
      case Manifold::Torus2:
        return torus_point(2 * kPi * rng.uniform01(), 2 * kPi * rng.uniform01());
      default:
        return sphere_point(rng.normal(), rng.normal(), rng.normal());
    }
  };
  for (Manifold m : {Manifold::Circle, Manifold::Torus2, Manifold::Sphere2}) {
    int dim = dimension(m);
    for (int trial = 0; trial < 100; ++trial) {
      auto x = random_point(m);
      TangentVector v;
      v.base = x;
      double r = 0.9 * kPi * rng.uniform01();
      double phi = 2 * kPi * rng.uniform01();
      v.components[0] = dim == 1 ? r * (rng.uniform01() < 0.5 ? -1 : 1) : r * std::cos(phi);
      if (dim == 2) v.components[1] = r * std::sin(phi);
      auto y = exp_map(x, v);
      CHECK(dist(x, y) == doctest::Approx(r).epsilon(1e-10));
      auto back = log_map(x, y);
      CHECK(std::abs(back.components[0] - v.components[0]) < 1e-9);
      CHECK(std::abs(back.components[1] - v.components[1]) < 1e-9);
      // Round trip the other way as well.
      auto y2 = exp_map(x, back);
      CHECK(dist(y, y2) < 1e-10);
    }
  }
}

TEST_CASE("brownian_step moments") {
  SUBCASE("zero step is identity") {
    RandomStream rng(1, 1);
    auto x = torus_point(1.0, 2.0);
    auto y = brownian_step(x, 0.0, rng);
    CHECK(y.coords == x.coords);
  }

  SUBCASE("mean displacement vanishes on the torus") {
    RandomStream rng(5, 0);
    auto x = torus_point(3.0, 1.0);
    const int n = 100000;
    const double h = 1e-3;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      auto v = log_map(x, brownian_step(x, h, rng));
      s1 += v.components[0];
      s2 += v.components[1];
    }
    double se = std::sqrt(h / n);
    CHECK(std::abs(s1 / n) < 3 * se);
    CHECK(std::abs(s2 / n) < 3 * se);
  }

  SUBCASE("squared displacement matches dim * h") {
    RandomStream rng(6, 0);
    auto x = torus_point(0.5, 4.0);
    const int n = 100000;
    const double h = 1e-3;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = dist(x, brownian_step(x, h, rng));
      sq += d * d;
    }
    // d^2/h is chi^2 with 2 dof: sd = 2h per draw.
    double se = 2.0 * h / std::sqrt(double(n));
    CHECK(std::abs(sq / n - 2 * h) < 3 * se);
  }

  SUBCASE("covariance is h * I") {
    const int n = 100000;
    for (Manifold m : {Manifold::Circle, Manifold::Torus2, Manifold::Sphere2}) {
      RandomStream rng(9, static_cast<std::uint64_t>(m));
      ManifoldPoint x = m == Manifold::Circle  ? circle_point(1.0)
                        : m == Manifold::Torus2 ? torus_point(1.0, 2.0)
                                                : sphere_point(1.0, 1.0, 1.0);
      const double h = 1e-3;
      double c00 = 0, c01 = 0, c11 = 0;
      for (int i = 0; i < n; ++i) {
        auto v = log_map(x, brownian_step(x, h, rng));
        c00 += v.components[0] * v.components[0];
        c01 += v.components[0] * v.components[1];
        c11 += v.components[1] * v.components[1];
      }
      CHECK(std::abs(c00 / n - h) < 0.05 * h);
      if (dimension(m) == 2) {
        CHECK(std::abs(c11 / n - h) < 0.05 * h);
        CHECK(std::abs(c01 / n) < 0.05 * h);
      }
    }
  }
}

TEST_CASE("grid quadrature") {
  SUBCASE("circle resolution 4") {
    auto g = grid(Manifold::Circle, 4);
    REQUIRE(g.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(g[i].point.coords[0] == doctest::Approx(i * kPi / 2).epsilon(1e-12));
      CHECK(g[i].weight == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
  }

  SUBCASE("torus product rule") {
    auto g = grid(Manifold::Torus2, 8);
    REQUIRE(g.size() == 64);
    for (const auto& n : g)
      CHECK(n.weight == doctest::Approx(std::pow(2 * kPi / 8, 2)).epsilon(1e-12));
  }

  SUBCASE("weights sum to total volume") {
    for (Manifold m : {Manifold::Circle, Manifold::Torus2, Manifold::Sphere2}) {
      for (int res : {2, 7, 16, 33}) {
        auto g = grid(m, res);
        double sum = 0.0;
        for (const auto& n : g) {
          REQUIRE(n.weight > 0.0);
          sum += n.weight;
        }
        CHECK(std::abs(sum - total_volume(m)) < 1e-9);
      }
    }
  }

  SUBCASE("rejects resolution below 2") {
    CHECK_THROWS_AS((void)grid(Manifold::Circle, 1), std::invalid_argument);
  }
}
