#include "wpcn/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpcn {

double implied_rho(std::size_t device, const Action& action, const SystemParams& params) {
  const double tau = action.tau[device + 1];
  if (tau <= 0.0) return 0.0;
  return action.spend[device] * params.device[device].quantum_j / tau;
}

double harvested_energy(std::size_t device, const Action& action, double efficiency, double gain) {
  double transferred = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == device + 1) continue;  // single antenna: no harvesting while transmitting
    transferred += action.tau[j] * action.power[j];
  }
  return efficiency * gain * transferred;
}

int harvested_quanta(double energy_j, double quantum_j) {
  if (energy_j <= 0.0 || quantum_j <= 0.0) return 0;
  const double ratio = energy_j / quantum_j;
  if (ratio >= 1e9) return 1'000'000'000;
  // The small offset absorbs rounding in exact multiples such as 8e-5 / 5e-7.
  return static_cast<int>(std::floor(ratio + 1e-9));
}

int next_battery(int battery, int spend, long long harvested, int battery_max) {
  if (spend < 0 || spend > battery) {
    throw std::logic_error("next_battery: spend exceeds stored energy");
  }
  const long long level = static_cast<long long>(battery) - spend + std::max(0LL, harvested);
  return static_cast<int>(std::min<long long>(battery_max, level));
}

double uplink_rate(double tau, double rho, double power, double gain, double noise_w,
                   double gamma_si, double bandwidth_hz) {
  if (tau <= 0.0 || rho <= 0.0) return 0.0;
  const double sinr = gain * rho / (noise_w + gamma_si * power);
  return bandwidth_hz * tau * std::log2(1.0 + sinr);
}

double device_rate(std::size_t device, const Action& action, double gain, const SystemParams& params) {
  return uplink_rate(action.tau[device + 1], implied_rho(device, action, params), action.power[device + 1],
                     gain, params.noise_power_w(), params.gamma_si, params.bandwidth_hz);
}

double slot_reward(const std::array<double, kDevices>& uplink_gain, const Action& action,
                   const SystemParams& params) {
  return params.alpha * device_rate(0, action, uplink_gain[0], params) +
         (1.0 - params.alpha) * device_rate(1, action, uplink_gain[1], params);
}

}  // namespace wpcn
