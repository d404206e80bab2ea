#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wpcn/mdp_solver.hpp"

using namespace wpcn;

namespace {

SystemParams small(int b1, int b2, int bins, int m, const char* alpha = "0.5") {
  return validate(RawConfig{{"battery_quanta1", std::to_string(b1)},
                            {"battery_quanta2", std::to_string(b2)},
                            {"channel_bins", std::to_string(bins)},
                            {"tau_steps", std::to_string(m)},
                            {"alpha", alpha}});
}

}  // namespace

TEST_CASE("state space size and index round trip") {
  CHECK(build_state_space(default_params()).size() == 1936);
  CHECK(build_state_space(small(1, 1, 1, 2)).size() == 4);

  const StateSpace space(small(3, 2, 3, 2));
  CHECK(space.size() == 4u * 3u * 81u);
  for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.index(space.state(i)) == i);
  CHECK(space.state(0) == MdpState{});
  CHECK_THROWS_AS(space.state(space.size()), std::out_of_range);
  CHECK_THROWS_AS(space.index(MdpState{{4, 0}, {0, 0}, {0, 0}}), std::out_of_range);
}

TEST_CASE("state cap refuses oversized spaces with the count") {
  SystemParams p = default_params();
  p.solver.max_states = 1000;
  try {
    StateSpace space(p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("1936") != std::string::npos);
  }
}

TEST_CASE("transitions spread equally over every channel combination") {
  const SystemParams p = default_params();
  const StateSpace space(p);
  const ChannelModel channels(p);
  const auto grid = ActionGrid::from(p);
  for (std::size_t s : {std::size_t{0}, std::size_t{517}, space.size() - 1}) {
    const MdpState st = space.state(s);
    for (const auto& a : enumerate_actions(st.battery, grid, Mode::full_duplex, p)) {
      const Transition t = successor(st, a, p, channels, space);
      CHECK(t.successor_count == 16);
      CHECK(t.probability == 1.0 / 16.0);
      CHECK(t.probability * static_cast<double>(t.successor_count) == 1.0);
      const auto next = successor_states(t, space);
      CHECK(next.size() == 16);
      for (std::size_t k = 0; k < next.size(); ++k) CHECK(space.state(next[k]).battery == t.next_battery);
    }
  }
  // Idle action with zero power leaves the batteries unchanged.
  const MdpState st{{4, 7}, {1, 0}, {0, 1}};
  CHECK(successor(st, Action{}, p, channels, space).next_battery == BatteryLevels{4, 7});
  Action overspend;
  overspend.tau = {0.0, 1.0, 0.0};
  overspend.spend = {5, 0};
  CHECK_THROWS_AS(successor(st, overspend, p, channels, space), std::logic_error);
}

TEST_CASE("backup from empty batteries with zero values is zero") {
  const MdpModel model(default_params(), Mode::full_duplex);
  const std::vector<double> zeros(model.space().size(), 0.0);
  const auto r = bellman_backup(0, zeros, model);
  CHECK(r.value == 0.0);
  CHECK(r.action.spend == std::array<int, kDevices>{0, 0});
}

TEST_CASE("degenerate single-state model has zero gain") {
  const SystemParams p = small(0, 0, 1, 2);
  const MdpModel model(p, Mode::full_duplex);
  CHECK(model.space().size() == 1);
  CHECK(bellman_backup(0, std::vector<double>{0.0}, model).value == 0.0);
  CHECK(relative_value_iteration(p, Mode::full_duplex).gain == 0.0);
}

TEST_CASE("constant shifts of the value function change no argmax") {
  const MdpModel model(small(4, 4, 2, 5), Mode::full_duplex);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1e5);
  std::vector<double> values(model.space().size());
  for (double& v : values) v = u(rng);
  for (double kappa : {-3.5e5, 1.0, 7.25e6}) {
    std::vector<double> shifted = values;
    for (double& v : shifted) v += kappa;
    for (std::size_t s = 0; s < model.space().size(); ++s) {
      const auto a = bellman_backup(s, values, model);
      const auto b = bellman_backup(s, shifted, model);
      CHECK(a.action == b.action);
      CHECK(b.value - a.value == doctest::Approx(kappa).epsilon(1e-9));
    }
  }
}

TEST_CASE("backup matches a direct maximization over enumerated actions") {
  const SystemParams p = small(3, 2, 2, 3);
  const MdpModel model(p, Mode::full_duplex);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e5, 1e5);
  std::vector<double> values(model.space().size());
  for (double& v : values) v = u(rng);
  for (std::size_t s = 0; s < model.space().size(); ++s) {
    const MdpState st = model.space().state(s);
    double best = -1e300;
    Action best_action;
    for (const auto& a : enumerate_actions(st.battery, model.grid(), Mode::full_duplex, p)) {
      const Transition t = successor(st, a, p, model.channels(), model.space());
      double q = state_reward(st, a, p, model.channels());
      for (std::size_t next : successor_states(t, model.space())) q += t.probability * values[next];
      if (q > best + 1e-9 * std::abs(best)) {
        best = q;
        best_action = a;
      }
    }
    const auto r = bellman_backup(s, values, model);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
    const Transition tb = successor(st, r.action, p, model.channels(), model.space());
    const Transition tq = successor(st, best_action, p, model.channels(), model.space());
    CHECK(tb.next_battery == tq.next_battery);
  }
}

TEST_CASE("relative value iteration converges with a bracketing residual") {
  const SystemParams p = small(5, 5, 2, 5);
  const auto r = relative_value_iteration(p, Mode::full_duplex);
  CHECK(r.gain > 0.0);
  CHECK(r.span <= p.solver.tolerance * std::max(1.0, r.gain));
  CHECK(r.span_history.size() == static_cast<std::size_t>(r.iterations));
  CHECK(r.span_history.back() == r.span);
  CHECK(r.gain_lower <= r.gain + 1e-9 * r.gain);
  CHECK(r.gain_upper >= r.gain - 1e-9 * r.gain);
  CHECK(r.values[0] == 0.0);
  CHECK(r.policy.size() == build_state_space(p).size());
}

TEST_CASE("gain does not depend on the initial values") {
  const SystemParams p = small(5, 4, 2, 5);
  const auto zero = relative_value_iteration(p, Mode::full_duplex);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> init(zero.values.size());
  for (double& v : init) v = u(rng);
  const auto random = relative_value_iteration(p, Mode::full_duplex, init);
  CHECK(std::abs(random.gain - zero.gain) <= 2.0 * p.solver.tolerance * zero.gain);
}

TEST_CASE("results are bit-identical for any worker count") {
  SystemParams p = small(6, 6, 2, 6);
  const auto one = relative_value_iteration(p, Mode::full_duplex);
  p.solver.workers = 3;
  const auto three = relative_value_iteration(p, Mode::full_duplex);
  CHECK(one.gain == three.gain);
  CHECK(one.values == three.values);
  CHECK(one.policy == three.policy);
  CHECK(one.iterations == three.iterations);
}

TEST_CASE("iteration cap raises a diagnostic with the last span") {
  SystemParams p = small(5, 5, 2, 5);
  p.solver.max_iterations = 2;
  try {
    relative_value_iteration(p, Mode::full_duplex);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.last_span() > 0.0);
  }
}

TEST_CASE("full duplex dominates half duplex and agrees at the degenerate weights") {
  for (const char* alpha : {"0", "0.3", "0.5", "1"}) {
    CAPTURE(alpha);
    const SystemParams p = small(4, 4, 2, 5, alpha);
    const double fd = relative_value_iteration(p, Mode::full_duplex).gain;
    const double hd = relative_value_iteration(p, Mode::half_duplex).gain;
    CHECK(fd >= hd - 1e-9 * std::max(1.0, hd));
    if (std::string(alpha) == "0" || std::string(alpha) == "1") CHECK(std::abs(fd - hd) <= 1e-5 * fd);
  }
}

TEST_CASE("half-duplex policies never use uplink-portion power") {
  const auto r = relative_value_iteration(small(4, 4, 2, 5), Mode::half_duplex);
  for (std::size_t s = 0; s < r.policy.size(); ++s) {
    CHECK(r.policy.at(s).power[1] == 0.0);
    CHECK(r.policy.at(s).power[2] == 0.0);
  }
}

TEST_CASE("exact evaluation of the optimal policy reproduces the gain") {
  const SystemParams p = small(5, 5, 2, 5);
  const auto r = relative_value_iteration(p, Mode::full_duplex);
  const auto eval = evaluate_policy(r.policy, p);
  CHECK(eval.gain == doctest::Approx(r.gain).epsilon(1e-5));
  CHECK(eval.gain == doctest::Approx(p.alpha * eval.device_gain[0] + (1 - p.alpha) * eval.device_gain[1]));
}

TEST_CASE("myopic baseline spends everything and never beats the optimum") {
  const SystemParams p = small(5, 5, 2, 5);
  const Policy greedy = myopic_policy(p);
  const StateSpace space(p);
  CHECK(greedy.at(0).spend == std::array<int, kDevices>{0, 0});
  for (std::size_t s = 0; s < space.size(); ++s) {
    const MdpState st = space.state(s);
    const Action& a = greedy.at(s);
    CHECK(is_feasible(a, st.battery, p, Mode::myopic));
    for (std::size_t i = 0; i < kDevices; ++i) CHECK(a.spend[i] == max_spend(i, a.tau[i + 1], st.battery[i], p));
  }
  for (const char* alpha : {"0.2", "0.5", "0.9"}) {
    const SystemParams q = small(5, 5, 2, 5, alpha);
    const double optimum = relative_value_iteration(q, Mode::full_duplex).gain;
    CHECK(evaluate_policy(myopic_policy(q), q).gain <= optimum + 1e-9);
  }
}

TEST_CASE("policy lookups name the missing state") {
  Policy p(3);
  CHECK_FALSE(p.has(1));
  try {
    p.at(1);
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("solve files round trip exactly") {
  const SystemParams p = small(3, 3, 2, 4);
  const auto r = relative_value_iteration(p, Mode::half_duplex);
  std::stringstream buf;
  write_solve_result(buf, r, p);
  const SolveFile f = read_solve_result(buf);
  CHECK(f.version == kSolveFileVersion);
  CHECK(f.params_hash == hash_hex(params_hash(p)));
  CHECK(f.mode == Mode::half_duplex);
  CHECK(f.gain == r.gain);
  CHECK(f.iterations == r.iterations);
  CHECK(f.span == r.span);
  CHECK(f.values == r.values);
  CHECK(f.policy == r.policy);
  const StateSpace space(p);
  for (std::size_t s = 0; s < space.size(); ++s) CHECK(f.states[s] == space.state(s));

  std::stringstream again;
  write_solve_result(again, r, p);
  std::stringstream truncated(again.str().substr(0, again.str().size() / 2));
  CHECK_THROWS_AS(read_solve_result(truncated), std::runtime_error);
  std::stringstream garbage("version 9\n");
  CHECK_THROWS_AS(read_solve_result(garbage), std::runtime_error);
}
