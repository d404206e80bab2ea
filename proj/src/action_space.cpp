#include "wpcn/action_space.hpp"

#include <cmath>
#include <stdexcept>

namespace wpcn {

namespace {
constexpr double kRelativeSlack = 1e-12;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::full_duplex: return "fd";
    case Mode::half_duplex: return "hd";
    case Mode::myopic: return "myopic";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "fd") return Mode::full_duplex;
  if (text == "hd") return Mode::half_duplex;
  if (text == "myopic") return Mode::myopic;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected fd, hd or myopic)");
}

ActionGrid ActionGrid::from(const SystemParams& params) {
  const int m = params.grid.tau_steps;
  const int levels = params.grid.power_levels;
  if (m < 1 || levels < 2) throw ConfigError("tau_steps", "action grid is empty");
  ActionGrid grid;
  grid.tau_values.resize(m + 1);
  for (int k = 0; k <= m; ++k) grid.tau_values[k] = params.slot_length_s * k / m;
  grid.p_values.resize(levels);
  for (int k = 0; k < levels; ++k) grid.p_values[k] = params.p_max_w * k / (levels - 1);
  return grid;
}

std::vector<TransferConfig> transfer_configs(const ActionGrid& grid, Mode mode) {
  const int m = grid.tau_steps();
  const int levels = static_cast<int>(grid.p_values.size());
  if (m < 1 || levels < 1) throw ConfigError("tau_steps", "action grid is empty");
  std::vector<TransferConfig> out;
  for (int t0 = 0; t0 <= m; ++t0) {
    for (int t1 = 0; t0 + t1 <= m; ++t1) {
      for (int t2 = 0; t0 + t1 + t2 <= m; ++t2) {
        const int n0 = t0 > 0 ? levels : 1;
        const int n1 = (t1 > 0 && mode != Mode::half_duplex) ? levels : 1;
        const int n2 = (t2 > 0 && mode != Mode::half_duplex) ? levels : 1;
        for (int p0 = 0; p0 < n0; ++p0) {
          for (int p1 = 0; p1 < n1; ++p1) {
            for (int p2 = 0; p2 < n2; ++p2) {
              TransferConfig c;
              c.tau = {static_cast<std::uint8_t>(t0), static_cast<std::uint8_t>(t1), static_cast<std::uint8_t>(t2)};
              c.power = {static_cast<std::uint8_t>(p0), static_cast<std::uint8_t>(p1), static_cast<std::uint8_t>(p2)};
              out.push_back(c);
            }
          }
        }
      }
    }
  }
  return out;
}

int max_spend(std::size_t device, double tau, int battery, const SystemParams& params) {
  if (tau <= 0.0 || battery <= 0) return 0;
  const auto& d = params.device[device];
  const double limit = tau * d.rho_max_w / d.quantum_j;
  const int by_power = static_cast<int>(std::floor(limit * (1.0 + kRelativeSlack)));
  return std::min(battery, by_power);
}

Action make_action(const TransferConfig& config, const ActionGrid& grid, int spend1, int spend2) {
  Action a;
  for (std::size_t j = 0; j < 3; ++j) {
    a.tau[j] = grid.tau_values[config.tau[j]];
    a.power[j] = grid.p_values[config.power[j]];
  }
  a.spend = {spend1, spend2};
  return a;
}

std::vector<Action> enumerate_actions(const BatteryLevels& batteries, const ActionGrid& grid, Mode mode,
                                      const SystemParams& params) {
  std::vector<Action> out;
  for (const auto& config : transfer_configs(grid, mode)) {
    const int e1_max = max_spend(0, grid.tau_values[config.tau[1]], batteries[0], params);
    const int e2_max = max_spend(1, grid.tau_values[config.tau[2]], batteries[1], params);
    for (int e1 = 0; e1 <= e1_max; ++e1) {
      for (int e2 = 0; e2 <= e2_max; ++e2) out.push_back(make_action(config, grid, e1, e2));
    }
  }
  return out;
}

std::string_view to_string(FeasibilityTag tag) {
  switch (tag) {
    case FeasibilityTag::ok: return "ok";
    case FeasibilityTag::negative: return "negative";
    case FeasibilityTag::simplex: return "simplex";
    case FeasibilityTag::power: return "power";
    case FeasibilityTag::mode: return "mode";
    case FeasibilityTag::battery: return "battery";
    case FeasibilityTag::rho_max: return "rho_max";
    case FeasibilityTag::idle_spend: return "idle_spend";
  }
  return "?";
}

Feasibility is_feasible(const Action& action, const BatteryLevels& batteries, const SystemParams& params,
                        Mode mode) {
  auto fail = [](FeasibilityTag tag) { return Feasibility{false, tag}; };
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (action.tau[j] < 0.0 || action.power[j] < 0.0) return fail(FeasibilityTag::negative);
    total += action.tau[j];
  }
  for (std::size_t i = 0; i < kDevices; ++i) {
    if (action.spend[i] < 0) return fail(FeasibilityTag::negative);
  }
  if (total > params.slot_length_s * (1.0 + kRelativeSlack)) return fail(FeasibilityTag::simplex);
  for (std::size_t j = 0; j < 3; ++j) {
    if (action.power[j] > params.p_max_w * (1.0 + kRelativeSlack)) return fail(FeasibilityTag::power);
  }
  if (mode == Mode::half_duplex && (action.power[1] > 0.0 || action.power[2] > 0.0)) {
    return fail(FeasibilityTag::mode);
  }
  for (std::size_t i = 0; i < kDevices; ++i) {
    if (action.spend[i] > batteries[i]) return fail(FeasibilityTag::battery);
  }
  for (std::size_t i = 0; i < kDevices; ++i) {
    const double tau = action.tau[i + 1];
    if (action.spend[i] == 0) continue;
    if (tau <= 0.0) return fail(FeasibilityTag::idle_spend);
    const auto& d = params.device[i];
    if (action.spend[i] * d.quantum_j > tau * d.rho_max_w * (1.0 + kRelativeSlack)) {
      return fail(FeasibilityTag::rho_max);
    }
  }
  return {};
}

}  // namespace wpcn
