#include "wpcn/policy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpcn/channel.hpp"

namespace wpcn {

std::string_view to_string(Fidelity f) { return f == Fidelity::discrete ? "discrete" : "continuous"; }

Fidelity parse_fidelity(std::string_view text) {
  if (text == "discrete") return Fidelity::discrete;
  if (text == "continuous") return Fidelity::continuous;
  throw std::invalid_argument("unknown fidelity '" + std::string(text) + "'");
}

namespace {

std::string describe(const MdpState& s) {
  return "(b1=" + std::to_string(s.battery[0]) + ", b2=" + std::to_string(s.battery[1]) +
         ", g1=" + std::to_string(s.downlink[0]) + ", g2=" + std::to_string(s.downlink[1]) +
         ", h1=" + std::to_string(s.uplink[0]) + ", h2=" + std::to_string(s.uplink[1]) + ")";
}

constexpr long long kBatches = 100;

}  // namespace

EvalReport simulate(const Policy& policy, const SystemParams& params, long long slots, std::uint64_t seed,
                    Fidelity fidelity) {
  if (slots < 1) throw std::invalid_argument("simulate: horizon must be >= 1 slot");
  const StateSpace space(params);
  const ChannelModel channels(params);
  const FadingBins& bins = channels.bins();
  const int n = bins.size();
  const std::array<double, kDevices> mean = {params.mean_gain(0), params.mean_gain(1)};

  EvalReport report;
  report.slots = slots;
  report.seed = seed;
  report.fidelity = fidelity;
  report.min_battery = report.max_battery = report.initial_battery;

  Rng rng(seed);
  MdpState state;
  state.battery = report.initial_battery;
  std::array<double, kDevices> total{}, tail{};
  const long long tail_start = slots / 2;
  const long long batch_len = slots >= kBatches ? slots / kBatches : 1;
  std::vector<double> batch_means;
  double batch_sum = 0.0;
  long long batch_count = 0;

  for (long long k = 0; k < slots; ++k) {
    std::array<double, kDevices> g{}, h{};
    if (fidelity == Fidelity::discrete) {
      for (std::size_t i = 0; i < kDevices; ++i) state.downlink[i] = sample_bin(rng, n);
      for (std::size_t i = 0; i < kDevices; ++i) state.uplink[i] = sample_bin(rng, n);
      for (std::size_t i = 0; i < kDevices; ++i) {
        g[i] = channels.downlink_gain(i, state.downlink[i]);
        h[i] = channels.uplink_gain(i, state.uplink[i]);
      }
    } else {
      std::array<double, 4> nu2{};
      for (double& x : nu2) x = sample_fading(rng);
      for (std::size_t i = 0; i < kDevices; ++i) {
        state.downlink[i] = bins.bin_of(nu2[i]);
        state.uplink[i] = bins.bin_of(nu2[2 + i]);
        g[i] = mean[i] * nu2[i];
        h[i] = mean[i] * nu2[2 + i];
      }
    }

    const std::size_t index = space.index(state);
    if (!policy.has(index)) throw std::out_of_range("policy has no action for visited state " + describe(state));
    const Action& action = policy.at(index);

    double weighted = 0.0;
    for (std::size_t i = 0; i < kDevices; ++i) {
      const double bits = device_rate(i, action, h[i], params);
      total[i] += bits;
      if (k >= tail_start) tail[i] += bits;
      weighted += (i == 0 ? params.alpha : 1.0 - params.alpha) * bits;
    }
    batch_sum += weighted;
    if (++batch_count == batch_len) {
      batch_means.push_back(batch_sum / static_cast<double>(batch_len));
      batch_sum = 0.0;
      batch_count = 0;
    }

    for (std::size_t i = 0; i < kDevices; ++i) {
      const auto& d = params.device[i];
      const int harvested = harvested_quanta(harvested_energy(i, action, d.harvest_efficiency, g[i]), d.quantum_j);
      state.battery[i] = next_battery(state.battery[i], action.spend[i], harvested, d.battery_quanta);
      report.min_battery[i] = std::min(report.min_battery[i], state.battery[i]);
      report.max_battery[i] = std::max(report.max_battery[i], state.battery[i]);
    }
  }

  const double per_second = 1.0 / params.slot_length_s;
  const double tail_slots = static_cast<double>(slots - tail_start);
  for (std::size_t i = 0; i < kDevices; ++i) {
    report.throughput_bps[i] = total[i] / static_cast<double>(slots) * per_second;
    report.tail_throughput_bps[i] = tail[i] / tail_slots * per_second;
  }
  report.weighted_bps = params.alpha * report.throughput_bps[0] + (1.0 - params.alpha) * report.throughput_bps[1];
  report.tail_weighted_bps =
      params.alpha * report.tail_throughput_bps[0] + (1.0 - params.alpha) * report.tail_throughput_bps[1];

  if (batch_means.size() >= 2) {
    double mean_batch = 0.0;
    for (double x : batch_means) mean_batch += x;
    mean_batch /= static_cast<double>(batch_means.size());
    double var = 0.0;
    for (double x : batch_means) var += (x - mean_batch) * (x - mean_batch);
    var /= static_cast<double>(batch_means.size() - 1);
    report.std_error_bps = std::sqrt(var / static_cast<double>(batch_means.size())) * per_second;
  }
  return report;
}

ThroughputPair throughput_pair(const SystemParams& params, Mode mode, double alpha, long long slots,
                               std::uint64_t seed) {
  SystemParams weighted = params;
  weighted.alpha = alpha;
  weighted = validate(weighted);

  ThroughputPair out;
  Policy policy;
  if (mode == Mode::myopic) {
    policy = myopic_policy(weighted);
    out.model_gain_bps = evaluate_policy(policy, weighted).gain / weighted.slot_length_s;
  } else {
    SolveResult solved = relative_value_iteration(weighted, mode);
    out.model_gain_bps = solved.gain / weighted.slot_length_s;
    out.iterations = solved.iterations;
    policy = std::move(solved.policy);
  }
  const EvalReport report = simulate(policy, weighted, slots, seed, Fidelity::discrete);
  out.throughput_bps = report.throughput_bps;
  out.weighted_bps = report.weighted_bps;
  return out;
}

}  // namespace wpcn
