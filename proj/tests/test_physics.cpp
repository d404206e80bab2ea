#include <doctest.h>

#include <cmath>

#include "wpcn/physics.hpp"

using namespace wpcn;

namespace {

Action charge_only(double tau0, double p0) {
  Action a;
  a.tau = {tau0, 0.0, 0.0};
  a.power = {p0, 0.0, 0.0};
  return a;
}

}  // namespace

TEST_CASE("harvested energy sums the portions where the device listens") {
  CHECK(harvested_energy(0, charge_only(1.0, 2.0), 0.8, 5e-5) == doctest::Approx(8e-5).epsilon(1e-12));
  CHECK(harvested_energy(0, charge_only(1.0, 0.0), 0.8, 5e-5) == 0.0);

  Action a;
  a.tau = {0.2, 0.5, 0.3};
  a.power = {2.0, 2.0, 2.0};
  CHECK(harvested_energy(0, a, 0.8, 5e-5) == doctest::Approx(4e-5).epsilon(1e-12));
  // device 2 excludes its own 0.3 s portion instead
  CHECK(harvested_energy(1, a, 0.8, 5e-5) == doctest::Approx(0.8 * 5e-5 * 1.4).epsilon(1e-12));
}

TEST_CASE("harvested energy is linear in each tau-power product") {
  Action a;
  a.tau = {0.3, 0.3, 0.4};
  a.power = {1.0, 0.5, 2.0};
  const double base = harvested_energy(0, a, 0.7, 1e-4);
  Action b = a;
  b.power[2] *= 2.0;
  const double delta = harvested_energy(0, b, 0.7, 1e-4) - base;
  CHECK(delta == doctest::Approx(0.7 * 1e-4 * 0.4 * 2.0).epsilon(1e-12));
  Action c = a;
  c.power[1] = 100.0;  // own portion
  CHECK(harvested_energy(0, c, 0.7, 1e-4) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("harvested quanta floor the stored energy") {
  CHECK(harvested_quanta(8e-5, 5e-7) == 160);
  CHECK(harvested_quanta(4e-7, 5e-7) == 0);
  CHECK(harvested_quanta(2.9999 * 5e-7, 5e-7) == 2);
  CHECK(harvested_quanta(0.0, 5e-7) == 0);
  for (int k = 1; k < 500; ++k) CHECK(harvested_quanta(k * 1.25e-6, 1.25e-6) == k);
}

TEST_CASE("battery update saturates and conserves energy below the cap") {
  CHECK(next_battery(3, 2, 160, 10) == 10);
  CHECK(next_battery(5, 5, 0, 10) == 0);
  CHECK(next_battery(4, 1, 3, 10) == 6);
  CHECK_THROWS_AS(next_battery(2, 3, 0, 10), std::logic_error);
  for (int b = 0; b <= 6; ++b) {
    for (int e = 0; e <= b; ++e) {
      for (int c = 0; c <= 8; ++c) {
        const int next = next_battery(b, e, c, 6);
        CHECK(next >= 0);
        CHECK(next <= 6);
        if (b - e + c <= 6) CHECK(next - b == c - e);
      }
    }
  }
}

TEST_CASE("uplink rate follows the Shannon formula") {
  const double noise = 3.1623e-10;
  CHECK(uplink_rate(0.5, 0.0, 0.0, 1.0, noise, 0.0, 1e6) == 0.0);
  CHECK(uplink_rate(0.0, 1.0, 0.0, 1.0, noise, 0.0, 1e6) == 0.0);
  CHECK(uplink_rate(0.5, noise, 0.0, 1.0, noise, 0.0, 1e6) == doctest::Approx(5e5).epsilon(1e-12));

  // With gamma = 1e-7 and P = 2 W the SINR shrinks by (noise + gamma P) / noise.
  const double rho = 1e-3, h = 1e-5;
  const double clean = std::exp2(uplink_rate(1.0, rho, 2.0, h, noise, 0.0, 1.0)) - 1.0;
  const double dirty = std::exp2(uplink_rate(1.0, rho, 2.0, h, noise, 1e-7, 1.0)) - 1.0;
  CHECK(clean / dirty == doctest::Approx((noise + 2e-7) / noise).epsilon(1e-9));
  CHECK(clean / dirty == doctest::Approx(633.5).epsilon(1e-3));
}

TEST_CASE("uplink rate monotonicity and linearity in tau") {
  const double noise = 1e-10;
  for (double rho = 1e-6; rho < 1e-2; rho *= 3.0) {
    CHECK(uplink_rate(0.4, rho * 1.5, 1.0, 1e-5, noise, 1e-8, 1e6) > uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-8, 1e6));
    CHECK(uplink_rate(0.4, rho, 1.0, 2e-5, noise, 1e-8, 1e6) > uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-8, 1e6));
    CHECK(uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-7, 1e6) <= uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-8, 1e6));
    CHECK(uplink_rate(0.4, rho, 2.0, 1e-5, noise, 1e-8, 1e6) <= uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-8, 1e6));
    CHECK(uplink_rate(0.8, rho, 1.0, 1e-5, noise, 1e-8, 1e6) ==
          doctest::Approx(2.0 * uplink_rate(0.4, rho, 1.0, 1e-5, noise, 1e-8, 1e6)).epsilon(1e-12));
  }
  for (double p = 0.0; p <= 4.0; p += 0.5) {
    CHECK(uplink_rate(0.3, 1e-4, p, 1e-5, noise, 0.0, 1e6) == uplink_rate(0.3, 1e-4, 0.0, 1e-5, noise, 0.0, 1e6));
  }
}

TEST_CASE("slot reward weights the two devices") {
  SystemParams p = validate(RawConfig{});
  Action a;
  a.tau = {0.0, 0.5, 0.5};
  a.spend = {2, 2};
  const std::array<double, kDevices> gains{1e-4, 2e-5};
  const double r1 = device_rate(0, a, gains[0], p);
  const double r2 = device_rate(1, a, gains[1], p);
  CHECK(r1 > 0.0);
  CHECK(r2 > 0.0);
  CHECK(slot_reward(gains, a, p) == doctest::Approx(0.5 * (r1 + r2)).epsilon(1e-14));
  p.alpha = 1.0;
  CHECK(slot_reward(gains, a, p) == r1);
  p.alpha = 0.0;
  CHECK(slot_reward(gains, a, p) == r2);
  a.spend = {0, 0};
  CHECK(slot_reward(gains, a, p) == 0.0);

  SystemParams sym = validate(RawConfig{{"d2_m", "5"}, {"zeta2_j", "0.1"}});
  Action s;
  s.tau = {0.2, 0.4, 0.4};
  s.spend = {3, 3};
  const std::array<double, kDevices> same{5e-5, 5e-5};
  CHECK(slot_reward(same, s, sym) == doctest::Approx(device_rate(0, s, 5e-5, sym)).epsilon(1e-14));
}

TEST_CASE("implied rho spreads the spent quanta over the uplink portion") {
  const SystemParams p = validate(RawConfig{});
  Action a;
  a.tau = {0.5, 0.25, 0.25};
  a.spend = {4, 0};
  CHECK(implied_rho(0, a, p) == doctest::Approx(4 * 5e-7 / 0.25).epsilon(1e-14));
  CHECK(implied_rho(1, a, p) == 0.0);
}
