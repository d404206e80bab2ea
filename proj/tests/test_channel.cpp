#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/params.hpp"

using namespace wpcn;

namespace {

// Conditional mean of Exp(1) on [a, b) by composite Simpson, independent of the closed form.
double conditional_mean_numeric(double a, double b) {
  const int n = 200000;
  const double h = (b - a) / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    num += w * x * std::exp(-x);
    den += w * std::exp(-x);
  }
  return num / den;
}

}  // namespace

TEST_CASE("one bin has representative one") {
  const auto bins = FadingBins::equal_probability(1);
  CHECK(bins.size() == 1);
  CHECK(bins.representative(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bins.boundaries()[0] == 0.0);
  CHECK(std::isinf(bins.boundaries()[1]));
}

TEST_CASE("two bins split at ln 2") {
  const auto bins = FadingBins::equal_probability(2);
  CHECK(bins.boundaries()[1] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(bins.representative(0) == doctest::Approx(0.3068528194).epsilon(1e-9));
  CHECK(bins.representative(1) == doctest::Approx(1.6931471806).epsilon(1e-9));
  // Numerical integration cross-check; the upper bin is truncated far into the tail.
  CHECK(bins.representative(0) == doctest::Approx(conditional_mean_numeric(0.0, std::log(2.0))).epsilon(1e-9));
  CHECK(bins.representative(1) == doctest::Approx(conditional_mean_numeric(std::log(2.0), 60.0)).epsilon(1e-9));
}

TEST_CASE("bins carry equal mass and representatives average to one") {
  for (int n : {1, 2, 3, 4, 7, 16, 64}) {
    CAPTURE(n);
    const auto bins = FadingBins::equal_probability(n);
    const auto b = bins.boundaries();
    for (int k = 0; k < n; ++k) {
      CHECK(fading_cdf(b[k]) == doctest::Approx(static_cast<double>(k) / n).epsilon(1e-12));
      const double upper = k + 1 == n ? 1.0 : fading_cdf(b[k + 1]);
      CHECK(upper - fading_cdf(b[k]) == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
    const auto r = bins.representatives();
    for (int k = 1; k < n; ++k) CHECK(r[k] > r[k - 1]);
    for (int k = 0; k < n; ++k) {
      CHECK(r[k] >= b[k]);
      if (k + 1 < n) CHECK(r[k] < b[k + 1]);
    }
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    CHECK(std::abs(mean - 1.0) < 1e-12);
  }
}

TEST_CASE("expected bin gain equals the mean gain for many bins") {
  const auto bins = FadingBins::equal_probability(64);
  double total = 0.0;
  for (int k = 0; k < 64; ++k) total += bin_gain(bins, k, 5e-5) / 64.0;
  CHECK(std::abs(total - 5e-5) < 1e-9 * 5e-5);
}

TEST_CASE("bin gain scales the representative") {
  CHECK(bin_gain(FadingBins::equal_probability(1), 0, 5e-5) == doctest::Approx(5e-5));
  const auto two = FadingBins::equal_probability(2);
  CHECK(bin_gain(two, 1, 5e-5) == doctest::Approx(8.466e-5).epsilon(1e-4));
  CHECK(bin_gain(two, 0, 1.25e-5) == doctest::Approx(3.836e-6).epsilon(1e-3));
  CHECK_THROWS_AS(bin_gain(two, 2, 1.0), std::out_of_range);
  CHECK_THROWS_AS(bin_gain(two, -1, 1.0), std::out_of_range);
}

TEST_CASE("zero bins is a configuration error") {
  CHECK_THROWS_AS(FadingBins::equal_probability(0), ConfigError);
}

TEST_CASE("bin_of inverts the boundaries") {
  const auto bins = FadingBins::equal_probability(4);
  const auto b = bins.boundaries();
  CHECK(bins.bin_of(0.0) == 0);
  CHECK(bins.bin_of(b[1] - 1e-12) == 0);
  CHECK(bins.bin_of(b[1]) == 1);
  CHECK(bins.bin_of(b[3] + 10.0) == 3);
  for (int k = 0; k < 4; ++k) CHECK(bins.bin_of(bins.representative(k)) == k);
}

TEST_CASE("sample_bin is uniform and reproducible") {
  Rng one(7);
  for (int i = 0; i < 100; ++i) CHECK(sample_bin(one, 1) == 0);

  Rng rng(12345);
  std::vector<long> counts(4, 0);
  const long draws = 1'000'000;
  for (long i = 0; i < draws; ++i) ++counts[sample_bin(rng, 4)];
  for (long c : counts) CHECK(std::abs(static_cast<double>(c) / draws - 0.25) < 0.002);

  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) CHECK(sample_bin(a, 5) == sample_bin(b, 5));
}

TEST_CASE("sample_fading has unit mean") {
  Rng rng(3);
  double sum = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) sum += sample_fading(rng);
  CHECK(std::abs(sum / n - 1.0) < 0.01);
}
