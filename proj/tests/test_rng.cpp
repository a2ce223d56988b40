#include <doctest.h>

#include <cmath>

#include "manneal/rng.hpp"

using manneal::RandomStream;

TEST_CASE("streams are reproducible bit-for-bit") {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream c(42, 7), d(42, 8), e(43, 7);
  int same_cd = 0, same_ce = 0;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x = c.next_u64();
    if (x == d.next_u64()) ++same_cd;
    if (x == e.next_u64()) ++same_ce;
  }
  CHECK(same_cd == 0);
  CHECK(same_ce == 0);
}

TEST_CASE("frozen draw sequence") {
  // Golden values pin the generator; any change to the mixing breaks replay
  // of archived runs and must be deliberate.
  RandomStream r(1, 0);
  CHECK(r.next_u64() == 2528137235429938729ULL);
  CHECK(r.next_u64() == 14336786744164845983ULL);
  CHECK(r.next_u64() == 8906571961449270809ULL);
}

TEST_CASE("uniform01 range and mean") {
  RandomStream r(123, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  double se = (1.0 / std::sqrt(12.0)) / std::sqrt(double(n));
  CHECK(std::abs(sum / n - 0.5) < 3 * se);
}

TEST_CASE("normal moments") {
  RandomStream r(7, 3);
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    s1 += x;
    s2 += x * x;
  }
  double mean = s1 / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(double(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential moments") {
  RandomStream r(11, 5);
  const int n = 100000;
  double s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.exponential();
    REQUIRE(x >= 0.0);
    s1 += x;
  }
  CHECK(std::abs(s1 / n - 1.0) < 3.0 / std::sqrt(double(n)));
}
