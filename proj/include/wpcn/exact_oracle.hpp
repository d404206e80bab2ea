#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "wpcn/action_space.hpp"
#include "wpcn/params.hpp"

namespace wpcn {

class OracleCapExceeded : public std::runtime_error {
 public:
  OracleCapExceeded(double count, std::uint64_t cap);
  double count() const { return count_; }

 private:
  double count_;
};

struct OracleResult {
  /// Best average reward over unichain stationary deterministic policies, bits per slot.
  double gain = 0.0;
  std::uint64_t policies = 0;
  /// Policies whose chain has more than one recurrent class; reported, not averaged.
  std::uint64_t multichain = 0;
};

/// Brute-force verifier for toy instances: enumerates every stationary deterministic
/// policy and evaluates each one exactly from its balance equations.
///
/// Actions with identical successor batteries differ only in reward, so each state
/// keeps just the best-reward action per successor battery pair; no optimal policy
/// is lost by this. Throws OracleCapExceeded when the reduced policy count is above `cap`.
OracleResult exact_gain_oracle(const SystemParams& params, Mode mode, std::uint64_t cap = 1'000'000);

}  // namespace wpcn
