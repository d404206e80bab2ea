#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpcn {

/// Deterministic pathloss factor shared by channel gains and battery sizing.
inline constexpr double kPathlossConstant = 1.25e-3;

inline constexpr std::size_t kDevices = 2;

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// Noise power in watts for a spectral density in dBm/Hz over a bandwidth.
double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz);

/// Average power gain 1.25e-3 * d^-beta (the fading factor has unit mean).
double mean_channel_gain(double distance_m, double beta);

/// Battery capacity 1.25e-3 * d^-beta_ref * zeta, in joules.
double battery_capacity_joules(double distance_m, double beta_ref, double zeta_joules);

struct DeviceParams {
  double distance_m = 0.0;
  double harvest_efficiency = 0.0;
  double zeta_j = 0.0;
  /// Distance used to size the battery; usually equal to distance_m.
  double battery_ref_distance_m = 0.0;
  double rho_max_w = 0.0;
  /// Number of storable energy quanta (b_max); battery levels are 0..battery_quanta.
  int battery_quanta = 0;

  // Derived by validate().
  double battery_capacity_j = 0.0;
  double quantum_j = 0.0;

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

struct Discretization {
  int channel_bins = 2;
  int tau_steps = 10;
  /// Number of AP power levels, evenly spaced over [0, p_max].
  int power_levels = 2;

  friend bool operator==(const Discretization&, const Discretization&) = default;
};

struct SolverOptions {
  /// Span stopping threshold, relative to max(1, |gain|).
  double tolerance = 1e-6;
  long max_iterations = 100000;
  /// Aperiodicity weight in (0,1]; 1 is the plain relative value iteration update.
  double damping = 0.9;
  std::size_t max_states = 5'000'000;
  unsigned workers = 1;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct SystemParams {
  double slot_length_s = 1.0;
  double p_max_w = 2.0;
  double gamma_si = 0.0;
  double noise_psd_dbm_per_hz = -125.0;
  double bandwidth_hz = 1e6;
  double alpha = 0.5;
  double beta = 2.0;
  double beta_battery_ref = 2.0;
  std::array<DeviceParams, kDevices> device{};
  Discretization grid{};
  SolverOptions solver{};

  double noise_power_w() const { return noise_power_watts(noise_psd_dbm_per_hz, bandwidth_hz); }
  double mean_gain(std::size_t i) const { return mean_channel_gain(device[i].distance_m, beta); }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Key/value pairs as read from a configuration file, before validation.
using RawConfig = std::map<std::string, std::string>;

struct ConfigViolation {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  ConfigError(std::string field, std::string message);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on malformed lines.
RawConfig parse_config(std::istream& in);
RawConfig load_config(const std::string& path);

/// Every recognised key with its default value rendered as text.
const RawConfig& default_config();

/// Builds a fully derived SystemParams, or throws ConfigError listing every violation.
SystemParams validate(const RawConfig& raw);

/// Re-checks invariants and recomputes derived fields; validate(validate(p)) == validate(p).
SystemParams validate(const SystemParams& params);

SystemParams default_params();

/// Stable FNV-1a hash of every model-relevant field (worker count excluded).
std::uint64_t params_hash(const SystemParams& params);
std::string hash_hex(std::uint64_t hash);

}  // namespace wpcn
