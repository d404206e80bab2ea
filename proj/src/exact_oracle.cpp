#include "wpcn/exact_oracle.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "wpcn/mdp_solver.hpp"

namespace wpcn {

OracleCapExceeded::OracleCapExceeded(double count, std::uint64_t cap)
    : std::runtime_error("exact oracle refused: " + std::to_string(static_cast<unsigned long long>(count)) +
                         " policies exceed the cap of " + std::to_string(cap)),
      count_(count) {}

namespace {

struct Option {
  std::size_t next_pair = 0;
  double reward = 0.0;
};

// Solves pi (I - P) = 0 with sum(pi) = 1. Returns false if the system is singular,
// i.e. the chain has more than one recurrent class.
bool stationary(const std::vector<double>& transition, std::size_t n, std::vector<double>& pi) {
  std::vector<double> a(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a[r * n + c] = (r == c ? 1.0 : 0.0) - transition[c * n + r];
    }
  }
  std::vector<double> rhs(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;
  rhs[n - 1] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-10) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  pi.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double sum = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) sum -= a[r * n + c] * pi[c];
    pi[r] = sum / a[r * n + r];
  }
  return true;
}

}  // namespace

OracleResult exact_gain_oracle(const SystemParams& params, Mode mode, std::uint64_t cap) {
  const Mode action_mode = mode == Mode::half_duplex ? Mode::half_duplex : Mode::full_duplex;
  const StateSpace space(params);
  const ChannelModel channels(params);
  const ActionGrid grid = ActionGrid::from(params);
  const std::size_t n = space.size();
  const std::size_t combos = space.channel_combos();

  std::vector<std::vector<Option>> options(n);
  double count = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    const MdpState st = space.state(s);
    std::map<std::size_t, double> best;
    for (const Action& a : enumerate_actions(st.battery, grid, action_mode, params)) {
      const std::size_t next = space.battery_index(successor(st, a, params, channels, space).next_battery);
      const double r = state_reward(st, a, params, channels);
      auto [it, inserted] = best.emplace(next, r);
      if (!inserted && r > it->second) it->second = r;
    }
    for (const auto& [next, r] : best) options[s].push_back({next, r});
    count *= static_cast<double>(options[s].size());
  }
  if (count > static_cast<double>(cap)) throw OracleCapExceeded(count, cap);

  OracleResult result;
  result.gain = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice(n, 0);
  std::vector<double> transition(n * n), pi;
  const double share = 1.0 / static_cast<double>(combos);
  while (true) {
    std::fill(transition.begin(), transition.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t base = options[s][choice[s]].next_pair * combos;
      for (std::size_t c = 0; c < combos; ++c) transition[s * n + base + c] = share;
    }
    ++result.policies;
    if (stationary(transition, n, pi)) {
      double gain = 0.0;
      for (std::size_t s = 0; s < n; ++s) gain += pi[s] * options[s][choice[s]].reward;
      if (gain > result.gain) result.gain = gain;
    } else {
      ++result.multichain;
    }

    std::size_t s = 0;
    while (s < n && ++choice[s] == options[s].size()) choice[s++] = 0;
    if (s == n) break;
  }
  return result;
}

}  // namespace wpcn
