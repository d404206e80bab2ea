#include "wpcn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpcn/params.hpp"

namespace wpcn {

FadingBins FadingBins::equal_probability(int n) {
  if (n < 1) throw ConfigError("channel_bins", "must be >= 1");
  FadingBins bins;
  bins.boundaries_.resize(n + 1);
  for (int k = 0; k < n; ++k) {
    bins.boundaries_[k] = -std::log1p(-static_cast<double>(k) / n);
  }
  bins.boundaries_[n] = std::numeric_limits<double>::infinity();

  // n * integral_a^b x e^-x dx with e^-a_k = (n-k)/n; the last bin reduces to a+1.
  bins.representatives_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double lower = bins.boundaries_[k] + 1.0;
    if (k + 1 == n) {
      bins.representatives_[k] = lower;
    } else {
      const double upper = bins.boundaries_[k + 1] + 1.0;
      bins.representatives_[k] = lower * (n - k) - upper * (n - k - 1);
    }
  }
  return bins;
}

double FadingBins::representative(int k) const {
  if (k < 0 || k >= size()) throw std::out_of_range("FadingBins: bin index out of range");
  return representatives_[k];
}

int FadingBins::bin_of(double nu2) const {
  // boundaries_[0] == 0; find the last boundary <= nu2.
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end() - 1, nu2);
  int k = static_cast<int>(it - boundaries_.begin()) - 1;
  return std::clamp(k, 0, size() - 1);
}

double fading_cdf(double nu2) { return nu2 <= 0.0 ? 0.0 : -std::expm1(-nu2); }

double bin_gain(const FadingBins& bins, int k, double mean_gain) {
  return mean_gain * bins.representative(k);
}

int sample_bin(Rng& rng, int n) {
  if (n <= 1) return 0;
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(rng);
}

double sample_fading(Rng& rng) {
  std::exponential_distribution<double> dist(1.0);
  return dist(rng);
}

}  // namespace wpcn
