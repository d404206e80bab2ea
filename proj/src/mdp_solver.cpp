#include "wpcn/mdp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace wpcn {

// ---------------------------------------------------------------------------
// State space and channel gains
// ---------------------------------------------------------------------------

StateSpace::StateSpace(const SystemParams& params)
    : battery_max_{params.device[0].battery_quanta, params.device[1].battery_quanta},
      bins_(params.grid.channel_bins) {
  if (bins_ < 1) throw ConfigError("channel_bins", "must be >= 1");
  channel_combos_ = 1;
  for (int k = 0; k < 4; ++k) channel_combos_ *= static_cast<std::size_t>(bins_);
  const double count = static_cast<double>(battery_pairs()) * static_cast<double>(channel_combos_);
  if (count > static_cast<double>(params.solver.max_states)) {
    throw ConfigError("max_states", "state space has " + std::to_string(static_cast<unsigned long long>(count)) +
                                          " states, above the cap of " + std::to_string(params.solver.max_states));
  }
}

std::size_t StateSpace::index(const MdpState& s) const {
  for (std::size_t i = 0; i < kDevices; ++i) {
    if (s.battery[i] < 0 || s.battery[i] > battery_max_[i]) throw std::out_of_range("MdpState: battery out of range");
    if (s.downlink[i] < 0 || s.downlink[i] >= bins_ || s.uplink[i] < 0 || s.uplink[i] >= bins_) {
      throw std::out_of_range("MdpState: channel bin out of range");
    }
  }
  const std::size_t n = static_cast<std::size_t>(bins_);
  std::size_t channel = static_cast<std::size_t>(s.downlink[0]);
  channel = channel * n + static_cast<std::size_t>(s.downlink[1]);
  channel = channel * n + static_cast<std::size_t>(s.uplink[0]);
  channel = channel * n + static_cast<std::size_t>(s.uplink[1]);
  return battery_index(s.battery) * channel_combos_ + channel;
}

MdpState StateSpace::state(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("StateSpace: index out of range");
  MdpState s;
  std::size_t channel = index % channel_combos_;
  s.battery = batteries_of(index / channel_combos_);
  const std::size_t n = static_cast<std::size_t>(bins_);
  s.uplink[1] = static_cast<int>(channel % n);
  channel /= n;
  s.uplink[0] = static_cast<int>(channel % n);
  channel /= n;
  s.downlink[1] = static_cast<int>(channel % n);
  channel /= n;
  s.downlink[0] = static_cast<int>(channel);
  return s;
}

BatteryLevels StateSpace::batteries_of(std::size_t battery_index) const {
  const std::size_t stride = static_cast<std::size_t>(battery_max_[1] + 1);
  return {static_cast<int>(battery_index / stride), static_cast<int>(battery_index % stride)};
}

StateSpace build_state_space(const SystemParams& params) { return StateSpace(params); }

ChannelModel::ChannelModel(const SystemParams& params)
    : bins_(FadingBins::equal_probability(params.grid.channel_bins)) {
  for (std::size_t i = 0; i < kDevices; ++i) {
    const double mean = params.mean_gain(i);
    gains_[i].resize(bins_.size());
    for (int k = 0; k < bins_.size(); ++k) gains_[i][k] = bin_gain(bins_, k, mean);
  }
}

Transition successor(const MdpState& state, const Action& action, const SystemParams& params,
                     const ChannelModel& channels, const StateSpace& space) {
  Transition t;
  for (std::size_t i = 0; i < kDevices; ++i) {
    const auto& d = params.device[i];
    const double energy =
        harvested_energy(i, action, d.harvest_efficiency, channels.downlink_gain(i, state.downlink[i]));
    const int harvested = harvested_quanta(energy, d.quantum_j);
    t.next_battery[i] = next_battery(state.battery[i], action.spend[i], harvested, d.battery_quanta);
  }
  t.successor_count = space.channel_combos();
  t.probability = 1.0 / static_cast<double>(t.successor_count);
  return t;
}

std::vector<std::size_t> successor_states(const Transition& t, const StateSpace& space) {
  std::vector<std::size_t> out(t.successor_count);
  const std::size_t base = space.battery_index(t.next_battery) * space.channel_combos();
  for (std::size_t c = 0; c < t.successor_count; ++c) out[c] = base + c;
  return out;
}

double state_reward(const MdpState& state, const Action& action, const SystemParams& params,
                    const ChannelModel& channels) {
  return slot_reward({channels.uplink_gain(0, state.uplink[0]), channels.uplink_gain(1, state.uplink[1])}, action,
                     params);
}

const Action& Policy::at(std::size_t state) const {
  if (!has(state)) throw std::out_of_range("policy has no action for state " + std::to_string(state));
  return *actions_[state];
}

// ---------------------------------------------------------------------------
// Precomputed model
// ---------------------------------------------------------------------------

MdpModel::MdpModel(const SystemParams& params, Mode mode)
    : params_(params),
      mode_(mode),
      space_(params),
      channels_(params),
      grid_(ActionGrid::from(params)),
      configs_(transfer_configs(grid_, mode == Mode::half_duplex ? Mode::half_duplex : Mode::full_duplex)) {
  transferred_.resize(configs_.size());
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    const Action a = make_action(configs_[c], grid_, 0, 0);
    for (std::size_t i = 0; i < kDevices; ++i) transferred_[c][i] = harvested_energy(i, a, 1.0, 1.0);
  }

  const int bins = channels_.bins().size();
  const int taus = static_cast<int>(grid_.tau_values.size());
  const int levels = static_cast<int>(grid_.p_values.size());
  const double noise = params_.noise_power_w();
  for (std::size_t i = 0; i < kDevices; ++i) {
    const int spends = params_.device[i].battery_quanta + 1;
    spend_span_[i] = spends;
    auto& table = rates_[i];
    table.resize(static_cast<std::size_t>(bins) * taus * levels * spends);
    std::size_t k = 0;
    for (int h = 0; h < bins; ++h) {
      const double gain = channels_.uplink_gain(i, h);
      for (int t = 0; t < taus; ++t) {
        const double tau = grid_.tau_values[t];
        for (int p = 0; p < levels; ++p) {
          for (int e = 0; e < spends; ++e) {
            const double rho = tau > 0.0 ? e * params_.device[i].quantum_j / tau : 0.0;
            table[k++] = uplink_rate(tau, rho, grid_.p_values[p], gain, noise, params_.gamma_si, params_.bandwidth_hz);
          }
        }
      }
    }
  }
}

const double* MdpModel::rate_row(std::size_t device, int h_bin, int tau, int power) const {
  const std::size_t taus = grid_.tau_values.size();
  const std::size_t levels = grid_.p_values.size();
  const std::size_t row = (static_cast<std::size_t>(h_bin) * taus + tau) * levels + power;
  return rates_[device].data() + row * spend_span_[device];
}

std::vector<double> MdpModel::expected_values(std::span<const double> values) const {
  const std::size_t combos = space_.channel_combos();
  std::vector<double> out(space_.battery_pairs());
  for (std::size_t bp = 0; bp < out.size(); ++bp) {
    double sum = 0.0;
    const double* row = values.data() + bp * combos;
    for (std::size_t c = 0; c < combos; ++c) sum += row[c];
    out[bp] = sum / static_cast<double>(combos);
  }
  return out;
}

MdpModel::Choice MdpModel::backup(std::size_t state, std::span<const double> expected_next) const {
  const MdpState s = space_.state(state);
  const auto& bmax = space_.battery_max();
  const std::size_t stride = static_cast<std::size_t>(bmax[1] + 1);
  const double w1 = params_.alpha;
  const double w2 = 1.0 - params_.alpha;
  std::array<double, kDevices> scale{};
  for (std::size_t i = 0; i < kDevices; ++i) {
    scale[i] = params_.device[i].harvest_efficiency * channels_.downlink_gain(i, s.downlink[i]);
  }

  Choice best{-std::numeric_limits<double>::infinity(), 0, 0, 0};
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    const auto& cfg = configs_[c];
    const int e1_max = max_spend(0, grid_.tau_values[cfg.tau[1]], s.battery[0], params_);
    const int e2_max = max_spend(1, grid_.tau_values[cfg.tau[2]], s.battery[1], params_);
    const int c1 = harvested_quanta(scale[0] * transferred_[c][0], params_.device[0].quantum_j);
    const int c2 = harvested_quanta(scale[1] * transferred_[c][1], params_.device[1].quantum_j);
    const double* r1 = rate_row(0, s.uplink[0], cfg.tau[1], cfg.power[1]);
    const double* r2 = rate_row(1, s.uplink[1], cfg.tau[2], cfg.power[2]);
    for (int e1 = 0; e1 <= e1_max; ++e1) {
      const std::size_t nb1 = static_cast<std::size_t>(next_battery(s.battery[0], e1, c1, bmax[0]));
      const double* row = expected_next.data() + nb1 * stride;
      for (int e2 = 0; e2 <= e2_max; ++e2) {
        const int nb2 = next_battery(s.battery[1], e2, c2, bmax[1]);
        const double v = w1 * r1[e1] + w2 * r2[e2] + row[nb2];
        if (v > best.value) best = {v, c, e1, e2};
      }
    }
  }
  return best;
}

MdpModel::Choice MdpModel::greedy(std::size_t state) const {
  const MdpState s = space_.state(state);
  const auto& bmax = space_.battery_max();
  const double w1 = params_.alpha;
  const double w2 = 1.0 - params_.alpha;
  std::array<double, kDevices> scale{};
  for (std::size_t i = 0; i < kDevices; ++i) {
    scale[i] = params_.device[i].harvest_efficiency * channels_.downlink_gain(i, s.downlink[i]);
  }
  Choice best{-std::numeric_limits<double>::infinity(), 0, 0, 0};
  int best_stored = -1;
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    const auto& cfg = configs_[c];
    const int e1 = max_spend(0, grid_.tau_values[cfg.tau[1]], s.battery[0], params_);
    const int e2 = max_spend(1, grid_.tau_values[cfg.tau[2]], s.battery[1], params_);
    const int c1 = harvested_quanta(scale[0] * transferred_[c][0], params_.device[0].quantum_j);
    const int c2 = harvested_quanta(scale[1] * transferred_[c][1], params_.device[1].quantum_j);
    const double v = w1 * rate_row(0, s.uplink[0], cfg.tau[1], cfg.power[1])[e1] +
                     w2 * rate_row(1, s.uplink[1], cfg.tau[2], cfg.power[2])[e2];
    const int stored = next_battery(s.battery[0], e1, c1, bmax[0]) + next_battery(s.battery[1], e2, c2, bmax[1]);
    if (v > best.value || (v == best.value && stored > best_stored)) {
      best = {v, c, e1, e2};
      best_stored = stored;
    }
  }
  return best;
}

Action MdpModel::action(const Choice& c) const { return make_action(configs_.at(c.config), grid_, c.spend1, c.spend2); }

BackupResult bellman_backup(std::size_t state, std::span<const double> values, const MdpModel& model) {
  if (values.size() != model.space().size()) throw std::invalid_argument("bellman_backup: value function size mismatch");
  const auto expected = model.expected_values(values);
  const auto choice = model.backup(state, expected);
  return {choice.value, model.action(choice)};
}

// ---------------------------------------------------------------------------
// Relative value iteration
// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count < 2 * workers) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace

SolveResult relative_value_iteration(const SystemParams& params, Mode mode, std::span<const double> initial_values) {
  return relative_value_iteration(MdpModel(params, mode), initial_values);
}

SolveResult relative_value_iteration(const MdpModel& model, std::span<const double> initial_values) {
  const auto start = std::chrono::steady_clock::now();
  const auto& opts = model.params().solver;
  const std::size_t n = model.space().size();
  const std::size_t ref = StateSpace::reference();

  std::vector<double> h(n, 0.0);
  if (!initial_values.empty()) {
    if (initial_values.size() != n) throw std::invalid_argument("initial value function size mismatch");
    h.assign(initial_values.begin(), initial_values.end());
    const double shift = h[ref];
    for (double& x : h) x -= shift;
  }
  std::vector<double> next(n);
  std::vector<MdpModel::Choice> choice(n);

  SolveResult result;
  result.mode = model.mode();
  const double damping = opts.damping;
  double span = std::numeric_limits<double>::infinity();
  for (long iter = 1; iter <= opts.max_iterations; ++iter) {
    const auto expected = model.expected_values(h);
    parallel_for(n, opts.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        choice[s] = model.backup(s, expected);
        next[s] = choice[s].value;
      }
    });

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
      const double diff = next[s] - h[s];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    span = hi - lo;
    result.span_history.push_back(span);
    const double gain = next[ref];

    if (span <= opts.tolerance * std::max(1.0, std::abs(gain))) {
      result.gain = gain;
      result.gain_lower = lo;
      result.gain_upper = hi;
      result.iterations = iter;
      result.span = span;
      result.policy = Policy(n);
      for (std::size_t s = 0; s < n; ++s) result.policy.set(s, model.action(choice[s]));
      result.values = std::move(h);
      result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return result;
    }

    // Damped update keeps the same fixed points and removes periodic oscillation.
    for (std::size_t s = 0; s < n; ++s) {
      h[s] = (1.0 - damping) * h[s] + damping * (next[s] - gain);
    }
    h[ref] = 0.0;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "relative value iteration did not converge in %ld iterations (last span %.6g)",
                opts.max_iterations, span);
  throw SolverError(msg, span, opts.max_iterations);
}

// ---------------------------------------------------------------------------
// Baseline and exact policy evaluation
// ---------------------------------------------------------------------------

Policy myopic_policy(const SystemParams& params) {
  const MdpModel model(params, Mode::myopic);
  Policy policy(model.space().size());
  for (std::size_t s = 0; s < model.space().size(); ++s) policy.set(s, model.action(model.greedy(s)));
  return policy;
}

PolicyGain evaluate_policy(const Policy& policy, const SystemParams& params) {
  const StateSpace space(params);
  const ChannelModel channels(params);
  if (policy.size() != space.size()) throw std::invalid_argument("evaluate_policy: policy size does not match states");

  const std::size_t combos = space.channel_combos();
  const std::size_t pairs = space.battery_pairs();
  std::vector<std::size_t> next_pair(space.size());
  std::vector<std::array<double, kDevices>> pair_rate(pairs, {0.0, 0.0});
  for (std::size_t s = 0; s < space.size(); ++s) {
    const MdpState st = space.state(s);
    const Action& a = policy.at(s);
    next_pair[s] = space.battery_index(successor(st, a, params, channels, space).next_battery);
    for (std::size_t i = 0; i < kDevices; ++i) {
      pair_rate[s / combos][i] += device_rate(i, a, channels.uplink_gain(i, st.uplink[i]), params);
    }
  }

  // Lazy chain (half self-loop) shares the limiting distribution and is aperiodic.
  std::vector<double> dist(pairs, 0.0), step(pairs);
  dist[space.battery_index({0, 0})] = 1.0;
  const double share = 1.0 / static_cast<double>(combos);
  PolicyGain out;
  for (long iter = 1; iter <= 2'000'000; ++iter) {
    std::fill(step.begin(), step.end(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) step[next_pair[s]] += dist[s / combos] * share;
    double change = 0.0;
    for (std::size_t bp = 0; bp < pairs; ++bp) {
      const double updated = 0.5 * dist[bp] + 0.5 * step[bp];
      change = std::max(change, std::abs(updated - dist[bp]));
      dist[bp] = updated;
    }
    out.iterations = iter;
    if (change < 1e-15) break;
  }
  for (std::size_t i = 0; i < kDevices; ++i) {
    double g = 0.0;
    for (std::size_t bp = 0; bp < pairs; ++bp) g += dist[bp] * pair_rate[bp][i] * share;
    out.device_gain[i] = g;
  }
  out.gain = params.alpha * out.device_gain[0] + (1.0 - params.alpha) * out.device_gain[1];
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void write_solve_result(std::ostream& out, const SolveResult& result, const SystemParams& params) {
  const StateSpace space(params);
  if (result.values.size() != space.size() || result.policy.size() != space.size()) {
    throw std::invalid_argument("write_solve_result: result does not match params");
  }
  char buf[64];
  auto num = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "# wpcn solve result\n";
  out << "version " << kSolveFileVersion << '\n';
  out << "params_hash " << hash_hex(params_hash(params)) << '\n';
  out << "mode " << to_string(result.mode) << '\n';
  out << "gain " << num(result.gain) << '\n';
  out << "iterations " << result.iterations << '\n';
  out << "span " << num(result.span) << '\n';
  out << "states " << space.size() << '\n';
  out << "# b1 b2 g1 g2 h1 h2 value tau0 tau1 tau2 p0 p1 p2 e1 e2\n";
  for (std::size_t s = 0; s < space.size(); ++s) {
    const MdpState st = space.state(s);
    const Action& a = result.policy.at(s);
    out << st.battery[0] << ' ' << st.battery[1] << ' ' << st.downlink[0] << ' ' << st.downlink[1] << ' '
        << st.uplink[0] << ' ' << st.uplink[1] << ' ' << num(result.values[s]);
    for (double t : a.tau) out << ' ' << num(t);
    for (double p : a.power) out << ' ' << num(p);
    out << ' ' << a.spend[0] << ' ' << a.spend[1] << '\n';
  }
}

SolveFile read_solve_result(std::istream& in) {
  SolveFile file;
  std::string line;
  auto bad = [](const std::string& why) { return std::runtime_error("malformed solve file: " + why); };
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  auto field = [&](const char* key) {
    if (!next_line()) throw bad(std::string("missing ") + key);
    std::istringstream ls(line);
    std::string name, value;
    ls >> name >> value;
    if (name != key || value.empty()) throw bad(std::string("expected ") + key);
    return value;
  };
  file.version = std::stoi(field("version"));
  if (file.version != kSolveFileVersion) throw bad("unsupported version " + std::to_string(file.version));
  file.params_hash = field("params_hash");
  file.mode = parse_mode(field("mode"));
  file.gain = std::stod(field("gain"));
  file.iterations = std::stol(field("iterations"));
  file.span = std::stod(field("span"));
  const std::size_t count = std::stoul(field("states"));
  file.states.reserve(count);
  file.values.reserve(count);
  file.policy = Policy(count);
  for (std::size_t s = 0; s < count; ++s) {
    if (!next_line()) throw bad("truncated state records");
    std::istringstream ls(line);
    MdpState st;
    double value = 0.0;
    Action a;
    ls >> st.battery[0] >> st.battery[1] >> st.downlink[0] >> st.downlink[1] >> st.uplink[0] >> st.uplink[1] >> value;
    for (double& t : a.tau) ls >> t;
    for (double& p : a.power) ls >> p;
    ls >> a.spend[0] >> a.spend[1];
    if (!ls) throw bad("record " + std::to_string(s));
    file.states.push_back(st);
    file.values.push_back(value);
    file.policy.set(s, a);
  }
  return file;
}

}  // namespace wpcn
