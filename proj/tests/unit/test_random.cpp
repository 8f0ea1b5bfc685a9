#include <doctest.h>

#include <cmath>
#include <set>

#include "hom/error.hpp"
#include "hom/random.hpp"

using namespace hom;

TEST_CASE("streams are deterministic and distinct") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  CHECK(a.counter() == 100);
}

TEST_CASE("poisson edge cases") {
  CounterRng r(1, 0);
  CHECK(sample_poisson(r, 0.0) == 0);
  CHECK_THROWS_AS(sample_poisson(r, -1.0), ValidationError);
  CHECK_THROWS_AS(sample_poisson(r, std::nan("")), ValidationError);
}

TEST_CASE("poisson moments") {
  for (double mean : {0.3, 4.0, 883.0, 4653.0}) {
    CounterRng r(2024, static_cast<std::uint64_t>(mean * 10));
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(sample_poisson(r, mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    const double var = s2 / n - m * m;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
    // relative SE of a Poisson sample variance is about sqrt((2 + 1/mean) / n)
    CHECK(std::abs(var / mean - 1.0) < 5.0 * std::sqrt((2.0 + 1.0 / mean) / n));
  }
}
