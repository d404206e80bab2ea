#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wpcn {

using Rng = std::mt19937_64;

/// Equal-probability discretization of a unit-mean exponential fading power.
///
/// Bin k covers [boundary(k), boundary(k+1)) and carries probability 1/n. Its
/// representative is the conditional mean of the exponential inside the bin,
/// so the probability-weighted representatives average to exactly one.
class FadingBins {
 public:
  static FadingBins equal_probability(int n);

  int size() const { return static_cast<int>(representatives_.size()); }
  /// n+1 values; the first is 0 and the last is +infinity.
  std::span<const double> boundaries() const { return boundaries_; }
  std::span<const double> representatives() const { return representatives_; }
  double representative(int k) const;

  /// Bin index holding the fading power value nu2 >= 0.
  int bin_of(double nu2) const;

 private:
  std::vector<double> boundaries_;
  std::vector<double> representatives_;
};

/// CDF of the unit-mean exponential distribution.
double fading_cdf(double nu2);

/// Discrete power gain of bin k: mean_gain times the bin representative.
double bin_gain(const FadingBins& bins, int k, double mean_gain);

/// Uniform draw over {0, ..., n-1}.
int sample_bin(Rng& rng, int n);

/// Unit-mean exponential draw (Rayleigh fading power).
double sample_fading(Rng& rng);

}  // namespace wpcn
