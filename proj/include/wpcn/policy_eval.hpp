#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "wpcn/action_space.hpp"
#include "wpcn/mdp_solver.hpp"
#include "wpcn/params.hpp"

namespace wpcn {

enum class Fidelity {
  discrete,   // channels drawn from the bins used by the solver
  continuous, // exponential fading; bins only select the policy entry
};

std::string_view to_string(Fidelity f);
Fidelity parse_fidelity(std::string_view text);

struct EvalReport {
  std::array<double, kDevices> throughput_bps{};
  /// alpha * G1 + (1 - alpha) * G2.
  double weighted_bps = 0.0;
  /// Same quantities over the second half of the horizon.
  std::array<double, kDevices> tail_throughput_bps{};
  double tail_weighted_bps = 0.0;
  /// Batch-means standard error of weighted_bps.
  double std_error_bps = 0.0;
  long long slots = 0;
  std::uint64_t seed = 0;
  Fidelity fidelity = Fidelity::discrete;
  BatteryLevels initial_battery{};
  BatteryLevels min_battery{};
  BatteryLevels max_battery{};
};

/// Runs the slot dynamics for `slots` slots from empty batteries.
/// Throws std::out_of_range naming the state if the policy lacks a visited state.
EvalReport simulate(const Policy& policy, const SystemParams& params, long long slots, std::uint64_t seed,
                    Fidelity fidelity = Fidelity::discrete);

struct ThroughputPair {
  std::array<double, kDevices> throughput_bps{};
  double weighted_bps = 0.0;
  /// Gain of the policy on the discretized model (solver gain, or exact evaluation for myopic).
  double model_gain_bps = 0.0;
  long iterations = 0;
};

/// Solves at the given weight (mode myopic uses the greedy baseline) and simulates
/// the resulting policy with discrete fidelity.
ThroughputPair throughput_pair(const SystemParams& params, Mode mode, double alpha, long long slots = 1'000'000,
                               std::uint64_t seed = 1);

}  // namespace wpcn
