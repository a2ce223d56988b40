#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "manneal/errors.hpp"
#include "manneal/measures.hpp"

using namespace manneal;

namespace {
constexpr double kPi = std::numbers::pi;

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    path = std::string("measure_test_") + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
  static int counter;
};
int TempFile::counter = 0;
}  // namespace

TEST_CASE("atomic sampling") {
  SUBCASE("single atom is a Dirac") {
    auto spec = atomic_measure(Manifold::Circle, {circle_point(1.25)}, {1.0});
    RandomStream rng(1, 0);
    for (int i = 0; i < 100; ++i)
      CHECK(sample(spec, rng).coords[0] == doctest::Approx(1.25).epsilon(1e-15));
  }

  SUBCASE("two-atom frequencies inside binomial 3-sigma") {
    auto spec = atomic_measure(Manifold::Circle,
                               {circle_point(0.0), circle_point(kPi / 2)}, {0.5, 0.5});
    RandomStream rng(2, 0);
    const int n = 10000;
    int hits_a = 0;
    for (int i = 0; i < n; ++i) {
      double theta = sample(spec, rng).coords[0];
      bool is_a = theta == 0.0;
      bool is_b = theta == doctest::Approx(kPi / 2).epsilon(1e-15);
      REQUIRE((is_a || is_b));  // only listed atoms appear
      if (is_a) ++hits_a;
    }
    double band = 3.0 * std::sqrt(0.25 / n);
    CHECK(std::abs(double(hits_a) / n - 0.5) < band);
  }

  SUBCASE("weight validation") {
    CHECK_THROWS_AS(atomic_measure(Manifold::Circle, {circle_point(0)}, {0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(atomic_measure(Manifold::Circle,
                                   {circle_point(0), circle_point(1)}, {1.5, -0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(atomic_measure(Manifold::Circle, {}, {}), std::invalid_argument);
  }
}

TEST_CASE("sampling is reproducible per stream") {
  auto spec = von_mises_measure(1.0, 3.0);
  RandomStream a(99, 4), b(99, 4);
  for (int i = 0; i < 200; ++i)
    CHECK(sample(spec, a).coords[0] == sample(spec, b).coords[0]);
}

TEST_CASE("von Mises sampler") {
  SUBCASE("zero concentration is uniform") {
    auto spec = von_mises_measure(0.0, 0.0);
    RandomStream rng(3, 0);
    const int n = 10000;
    double c = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) {
      double theta = sample(spec, rng).coords[0];
      c += std::cos(theta);
      s += std::sin(theta);
    }
    double resultant = std::hypot(c / n, s / n);
    CHECK(resultant <= 0.05);
  }

  SUBCASE("mean direction matches location for concentration 4") {
    const double mu = 2.1, kappa = 4.0;
    auto spec = von_mises_measure(mu, kappa);
    RandomStream rng(4, 0);
    const int n = 10000;
    double c = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) {
      double theta = sample(spec, rng).coords[0];
      c += std::cos(theta);
      s += std::sin(theta);
    }
    double mean_dir = std::atan2(s / n, c / n);
    double rbar = std::hypot(c / n, s / n);
    double se = 1.0 / std::sqrt(n * rbar * kappa);
    CHECK(std::abs(std::remainder(mean_dir - mu, 2 * kPi)) < 3 * se);
  }
}

TEST_CASE("wrapped Gaussian mixture") {
  auto spec = wrapped_gaussian_mixture({{0.2, 0.1, 0.75}, {5.0, 0.2, 0.25}});
  RandomStream rng(5, 0);
  const int n = 10000;
  int near_first = 0;
  for (int i = 0; i < n; ++i) {
    double theta = sample(spec, rng).coords[0];
    REQUIRE(theta >= 0.0);
    REQUIRE(theta < 2 * kPi);
    if (std::abs(std::remainder(theta - 0.2, 2 * kPi)) < 0.5) ++near_first;
  }
  double band = 3.0 * std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(double(near_first) / n - 0.75) < band);
}

TEST_CASE("uniform cap sampler") {
  auto center = sphere_point(1.0, -2.0, 0.5);
  const double radius = 0.8;
  auto spec = uniform_cap_measure(center, radius);
  RandomStream rng(6, 0);
  const int n = 10000;
  int inner = 0;
  for (int i = 0; i < n; ++i) {
    auto p = sample(spec, rng);
    REQUIRE(dist(p, center) <= radius + 1e-12);
    if (dist(p, center) <= radius / 2) ++inner;
  }
  // Area-uniform law: P(dist <= r/2) = (1-cos(r/2)) / (1-cos r).
  double p_inner = (1.0 - std::cos(radius / 2)) / (1.0 - std::cos(radius));
  double band = 3.0 * std::sqrt(p_inner * (1 - p_inner) / n);
  CHECK(std::abs(double(inner) / n - p_inner) < band);
}

TEST_CASE("load_empirical") {
  SUBCASE("uniform weights over rows") {
    TempFile f("# comment\n0.0\n3.14159\n");
    auto spec = load_empirical(f.path, Manifold::Circle);
    REQUIRE(spec.atoms.size() == 2);
    CHECK(spec.weights[0] == doctest::Approx(0.5));
    CHECK(spec.weights[1] == doctest::Approx(0.5));
    CHECK(spec.atoms[1].coords[0] == doctest::Approx(3.14159));
  }

  SUBCASE("sphere row") {
    TempFile f("0.0,0.0,1.0\n");
    auto spec = load_empirical(f.path, Manifold::Sphere2);
    REQUIRE(spec.atoms.size() == 1);
    CHECK(spec.atoms[0].coords[2] == doctest::Approx(1.0));
  }

  SUBCASE("empty file is an ingestion error") {
    TempFile f("# only a comment\n");
    CHECK_THROWS_AS((void)load_empirical(f.path, Manifold::Circle), IngestionError);
    CHECK_THROWS_AS((void)load_empirical("does_not_exist.csv", Manifold::Circle),
                    IngestionError);
  }

  SUBCASE("malformed row names the row number") {
    TempFile f("0.0\nnot_a_number\n");
    try {
      (void)load_empirical(f.path, Manifold::Circle);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }

  SUBCASE("off-manifold sphere coordinates are a validation error") {
    TempFile f("0.5,0.5,0.5\n");
    CHECK_THROWS_AS((void)load_empirical(f.path, Manifold::Sphere2), ValidationError);
  }

  SUBCASE("wrong arity is a parse error") {
    TempFile f("0.1,0.2\n");
    CHECK_THROWS_AS((void)load_empirical(f.path, Manifold::Circle), ParseError);
  }
}
