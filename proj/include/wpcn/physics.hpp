#pragma once

#include <array>
#include <cstddef>

#include "wpcn/params.hpp"

namespace wpcn {

/// Per-slot decision. Index 0 of tau/power is the dedicated charging portion,
/// index i+1 is the uplink portion of device i. Uplink spend is in battery quanta.
struct Action {
  std::array<double, 3> tau{};
  std::array<double, 3> power{};
  std::array<int, kDevices> spend{};

  friend bool operator==(const Action&, const Action&) = default;
};

using BatteryLevels = std::array<int, kDevices>;

/// Uplink transmit power implied by spending `spend` quanta over the device's portion.
double implied_rho(std::size_t device, const Action& action, const SystemParams& params);

/// Energy harvested by a device in one slot: eta * g * sum of tau_j P_j over the
/// portions in which the device is not transmitting.
double harvested_energy(std::size_t device, const Action& action, double efficiency, double gain);

/// Whole quanta stored from `energy_j`; partial quanta are lost.
int harvested_quanta(double energy_j, double quantum_j);

/// min(b_max, b - e + c). Throws std::logic_error if the spend exceeds the stored quanta.
int next_battery(int battery, int spend, long long harvested, int battery_max);

/// Shannon rate in bits per slot: bandwidth * tau * log2(1 + h rho / (sigma2 + gamma P)).
double uplink_rate(double tau, double rho, double power, double gain, double noise_w,
                   double gamma_si, double bandwidth_hz);

/// Uplink bits of one device under `action` with uplink gain `gain`.
double device_rate(std::size_t device, const Action& action, double gain, const SystemParams& params);

/// Weighted slot reward alpha * R1 + (1 - alpha) * R2.
double slot_reward(const std::array<double, kDevices>& uplink_gain, const Action& action,
                   const SystemParams& params);

}  // namespace wpcn
