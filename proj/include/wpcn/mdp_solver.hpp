#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpcn/action_space.hpp"
#include "wpcn/channel.hpp"
#include "wpcn/params.hpp"
#include "wpcn/physics.hpp"

namespace wpcn {

/// Battery quanta of both devices plus the downlink (g) and uplink (h) fading bins.
struct MdpState {
  BatteryLevels battery{};
  std::array<int, kDevices> downlink{};
  std::array<int, kDevices> uplink{};

  friend bool operator==(const MdpState&, const MdpState&) = default;
};

/// Dense indexing of every MdpState. Layout: battery pair major, then the four
/// channel bins (g1, g2, h1, h2) with h2 fastest. Index 0 is the reference state
/// with empty batteries and every channel in bin 0.
class StateSpace {
 public:
  /// Throws ConfigError when the state count exceeds params.solver.max_states.
  explicit StateSpace(const SystemParams& params);

  std::size_t size() const { return battery_pairs() * channel_combos_; }
  std::size_t channel_combos() const { return channel_combos_; }
  std::size_t battery_pairs() const {
    return static_cast<std::size_t>(battery_max_[0] + 1) * static_cast<std::size_t>(battery_max_[1] + 1);
  }
  int bins() const { return bins_; }
  const BatteryLevels& battery_max() const { return battery_max_; }

  std::size_t index(const MdpState& s) const;
  MdpState state(std::size_t index) const;
  std::size_t battery_index(const BatteryLevels& b) const {
    return static_cast<std::size_t>(b[0]) * static_cast<std::size_t>(battery_max_[1] + 1) + static_cast<std::size_t>(b[1]);
  }
  BatteryLevels batteries_of(std::size_t battery_index) const;
  static constexpr std::size_t reference() { return 0; }

 private:
  BatteryLevels battery_max_{};
  int bins_ = 1;
  std::size_t channel_combos_ = 1;
};

/// Physical gains attached to each fading bin.
class ChannelModel {
 public:
  explicit ChannelModel(const SystemParams& params);

  const FadingBins& bins() const { return bins_; }
  double downlink_gain(std::size_t device, int bin) const { return gains_[device][bin]; }
  double uplink_gain(std::size_t device, int bin) const { return gains_[device][bin]; }

 private:
  FadingBins bins_;
  std::array<std::vector<double>, kDevices> gains_;
};

StateSpace build_state_space(const SystemParams& params);

struct Transition {
  BatteryLevels next_battery{};
  /// Probability of each successor; every channel-bin combination is equally likely.
  double probability = 0.0;
  std::size_t successor_count = 0;
};

/// Next battery levels under `action`; throws std::logic_error for infeasible spends.
Transition successor(const MdpState& state, const Action& action, const SystemParams& params,
                     const ChannelModel& channels, const StateSpace& space);

/// Indices of the successor states of a transition, in index order.
std::vector<std::size_t> successor_states(const Transition& t, const StateSpace& space);

/// Immediate weighted reward of `action` in `state`.
double state_reward(const MdpState& state, const Action& action, const SystemParams& params,
                    const ChannelModel& channels);

/// Stationary deterministic policy; entries may be missing for partially built policies.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::size_t states) : actions_(states) {}

  std::size_t size() const { return actions_.size(); }
  void set(std::size_t state, const Action& action) { actions_.at(state) = action; }
  bool has(std::size_t state) const { return state < actions_.size() && actions_[state].has_value(); }
  /// Throws std::out_of_range naming the state when no action is stored.
  const Action& at(std::size_t state) const;

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<std::optional<Action>> actions_;
};

struct SolveResult {
  Mode mode = Mode::full_duplex;
  /// Long-run average weighted reward, bits per slot.
  double gain = 0.0;
  /// Bracket min/max of the last Bellman residual.
  double gain_lower = 0.0;
  double gain_upper = 0.0;
  std::vector<double> values;
  Policy policy;
  long iterations = 0;
  double span = 0.0;
  std::vector<double> span_history;
  double wall_seconds = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_span, long iterations)
      : std::runtime_error(what), last_span_(last_span), iterations_(iterations) {}
  double last_span() const { return last_span_; }
  long iterations() const { return iterations_; }

 private:
  double last_span_;
  long iterations_;
};

/// Precomputed model for fast Bellman backups of one (params, mode) pair.
class MdpModel {
 public:
  MdpModel(const SystemParams& params, Mode mode);

  const SystemParams& params() const { return params_; }
  Mode mode() const { return mode_; }
  const StateSpace& space() const { return space_; }
  const ChannelModel& channels() const { return channels_; }
  const ActionGrid& grid() const { return grid_; }
  std::span<const TransferConfig> configs() const { return configs_; }

  struct Choice {
    double value = 0.0;
    std::size_t config = 0;
    int spend1 = 0;
    int spend2 = 0;
  };

  /// Maximizes reward + expected_next[next battery pair] over the feasible
  /// actions of `state`; the first maximizer in enumeration order wins.
  Choice backup(std::size_t state, std::span<const double> expected_next) const;

  /// Same as backup() but with spends pinned to their maxima and no lookahead:
  /// the slot-greedy choice. Ties prefer more stored energy afterwards.
  Choice greedy(std::size_t state) const;

  /// Mean value over channel bins for every battery pair.
  std::vector<double> expected_values(std::span<const double> values) const;

  Action action(const Choice& c) const;

 private:
  const double* rate_row(std::size_t device, int h_bin, int tau, int power) const;

  SystemParams params_;
  Mode mode_;
  StateSpace space_;
  ChannelModel channels_;
  ActionGrid grid_;
  std::vector<TransferConfig> configs_;
  // Per config: transferred energy seen by each device (sum of tau_j P_j, j != own portion).
  std::vector<std::array<double, kDevices>> transferred_;
  // rates_[device] indexed [h_bin][tau][power][spend].
  std::array<std::vector<double>, kDevices> rates_;
  std::array<int, kDevices> spend_span_{};
};

struct BackupResult {
  double value = 0.0;
  Action action;
};

/// One Bellman backup against a full value function (one entry per state).
BackupResult bellman_backup(std::size_t state, std::span<const double> values, const MdpModel& model);

/// Average-reward relative value iteration with synchronous sweeps and span stopping.
/// Throws SolverError when the iteration cap is hit first.
SolveResult relative_value_iteration(const SystemParams& params, Mode mode,
                                     std::span<const double> initial_values = {});
SolveResult relative_value_iteration(const MdpModel& model, std::span<const double> initial_values = {});

/// Slot-greedy baseline: spend as much as allowed and maximize only the current reward.
Policy myopic_policy(const SystemParams& params);

struct PolicyGain {
  double gain = 0.0;  // weighted, bits per slot
  std::array<double, kDevices> device_gain{};
  long iterations = 0;
};

/// Exact long-run reward of a fixed policy, started from empty batteries, via the
/// limiting battery distribution of the induced chain.
PolicyGain evaluate_policy(const Policy& policy, const SystemParams& params);

// Flat-file persistence of a solve.
inline constexpr int kSolveFileVersion = 1;

struct SolveFile {
  int version = kSolveFileVersion;
  std::string params_hash;
  Mode mode = Mode::full_duplex;
  double gain = 0.0;
  long iterations = 0;
  double span = 0.0;
  std::vector<MdpState> states;
  std::vector<double> values;
  Policy policy;
};

void write_solve_result(std::ostream& out, const SolveResult& result, const SystemParams& params);
/// Throws std::runtime_error on malformed input.
SolveFile read_solve_result(std::istream& in);

}  // namespace wpcn
