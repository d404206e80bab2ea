#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wpcn/params.hpp"
#include "wpcn/physics.hpp"

namespace wpcn {

enum class Mode {
  full_duplex,
  half_duplex,  // AP silent during uplink portions
  myopic,       // full-duplex feasibility, greedy per-slot policy
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Lattice of slot durations {0, T/m, ..., T} and AP power levels {0, ..., P_max}.
struct ActionGrid {
  std::vector<double> tau_values;
  std::vector<double> p_values;

  static ActionGrid from(const SystemParams& params);
  int tau_steps() const { return static_cast<int>(tau_values.size()) - 1; }
};

/// Slot durations and AP powers of an action, as grid indices.
struct TransferConfig {
  std::array<std::uint8_t, 3> tau{};
  std::array<std::uint8_t, 3> power{};
};

/// All (tau, P) index combinations allowed in `mode`, in lexicographic order of
/// (tau0, tau1, tau2, P0, P1, P2). A power level is only varied when its portion
/// is nonzero, since P_j has no effect when tau_j = 0.
std::vector<TransferConfig> transfer_configs(const ActionGrid& grid, Mode mode);

/// Largest spend of `device` that respects both its battery and rho_max over `tau`.
int max_spend(std::size_t device, double tau, int battery, const SystemParams& params);

Action make_action(const TransferConfig& config, const ActionGrid& grid, int spend1, int spend2);

/// Feasible actions for the given battery levels, in a fixed order: transfer
/// configuration first, then spend of device 1, then spend of device 2. The
/// first entry is always the all-idle action.
std::vector<Action> enumerate_actions(const BatteryLevels& batteries, const ActionGrid& grid, Mode mode,
                                      const SystemParams& params);

enum class FeasibilityTag {
  ok,
  negative,   // a duration, power or spend is negative
  simplex,    // tau0 + tau1 + tau2 > T
  power,      // P_j > P_max
  mode,       // uplink-portion power in half-duplex mode
  battery,    // spend exceeds stored quanta
  rho_max,    // implied uplink power above rho_max
  idle_spend, // spend with zero uplink duration
};

std::string_view to_string(FeasibilityTag tag);

struct Feasibility {
  bool feasible = true;
  FeasibilityTag tag = FeasibilityTag::ok;
  explicit operator bool() const { return feasible; }
};

Feasibility is_feasible(const Action& action, const BatteryLevels& batteries, const SystemParams& params,
                        Mode mode);

}  // namespace wpcn
