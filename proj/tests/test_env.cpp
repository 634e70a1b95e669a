#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ltune/env.hpp"
#include "ltune/rng.hpp"
#include "reward_cases.hpp"

using namespace ltune;

namespace {

dataset::LoadSample sample_from(double cp_pf, double cs_pf, double f) {
  dataset::LoadSample s;
  s.f = f;
  s.zl = circuit::load_from_optimal_caps(cp_pf * 1e-12, cs_pf * 1e-12, f);
  s.cp_opt = cp_pf * 1e-12;
  s.cs_opt = cs_pf * 1e-12;
  return s;
}

}  // namespace

TEST_CASE("reward matches the committed case table") {
  for (const auto& c : ltune_test::reward_cases()) {
    CAPTURE(c.doc);
    CAPTURE(c.gamma_now);
    CAPTURE(c.gamma_prev);
    CAPTURE(c.k_step);
    const double expected =
        ltune_test::reference_reward(c.gamma_now, c.gamma_prev, c.k_step);
    CHECK(env::reward(c.gamma_now, c.gamma_prev, c.k_step) == expected);
  }
}

TEST_CASE("reward spot values") {
  CHECK(env::reward(0.005, 0.005, 250) == 99.5);
  CHECK(env::reward(0.015, 0.015, 10) ==
        80.0 + 800.0 * (0.02 - 0.015) - 0.5);
  CHECK(env::reward(0.1, 0.1, 10) == -10.0 - 5.0 * std::log10(0.1) - 0.5);
}

TEST_CASE("reset builds the normalized observation") {
  env::Env sim{env::EnvConfig{}};
  const auto s = sim.reset(sample_from(8.0, 14.0, 1.5e9), 200);

  CHECK(s.f_norm == doctest::Approx(0.5).epsilon(1e-12));
  const double expected_norm = (11.0 - 0.5) / 20.5;
  CHECK(s.cp_norm == doctest::Approx(expected_norm).epsilon(1e-12));
  CHECK(s.cs_norm == doctest::Approx(expected_norm).epsilon(1e-12));
  CHECK(s.sin_phi * s.sin_phi + s.cos_phi * s.cos_phi ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.gamma_mag >= 0.0);
  CHECK(s.gamma_mag <= 1.0);

  const auto again = sim.reset(sample_from(8.0, 14.0, 1.5e9), 200);
  CHECK(again.as_array() == s.as_array());
}

TEST_CASE("observation is definitional") {
  env::Env sim{env::EnvConfig{}};
  const auto sample = sample_from(9.5, 12.5, 1.7e9);
  const auto s = sim.reset(sample, 200);
  CHECK(s.as_array() == sim.observe().as_array());

  const circuit::Complex g = circuit::reflection_coefficient(
      circuit::input_impedance({11e-12, 11e-12, sample.f}, sample.zl), 50.0);
  CHECK(s.gamma_mag == doctest::Approx(std::abs(g)).epsilon(1e-12));
  const double phi = std::atan2(g.imag(), g.real());
  CHECK(s.sin_phi == doctest::Approx(std::sin(phi)).epsilon(1e-9));
  CHECK(s.cos_phi == doctest::Approx(std::cos(phi)).epsilon(1e-9));
}

TEST_CASE("step moves and clips the capacitors") {
  env::Env sim{env::EnvConfig{}};
  sim.reset(sample_from(5.0, 17.0, 1.1e9), 500);
  CHECK(sim.cp() == doctest::Approx(11e-12));

  // action 5 = (+1, -1)
  sim.step(env::Action{5});
  CHECK(sim.cp() == doctest::Approx(11.5e-12).epsilon(1e-12));
  CHECK(sim.cs() == doctest::Approx(10.5e-12).epsilon(1e-12));

  // drive cp to the upper bound and keep pushing
  for (int i = 0; i < 19; ++i) sim.step(env::Action{6});
  CHECK(sim.cp() == doctest::Approx(21e-12).epsilon(1e-12));
  const int steps_before = sim.steps();
  sim.step(env::Action{6});
  CHECK(sim.cp() == doctest::Approx(21e-12).epsilon(1e-12));
  CHECK(sim.steps() == steps_before + 1);  // clipped step still counts
}

TEST_CASE("one lattice step away terminates with a near-exact match") {
  env::Env sim{env::EnvConfig{}};
  sim.reset(sample_from(11.5, 10.5, 1.4e9), 200);
  const auto out = sim.step(env::Action{5});  // (+1, -1)
  CHECK(out.terminal);
  CHECK(out.gamma_mag < 1e-9);
  CHECK(sim.done());
  CHECK_THROWS_AS(sim.step(env::Action{0}), std::logic_error);
}

TEST_CASE("already matched sample is terminal at reset") {
  env::Env sim{env::EnvConfig{}};
  sim.reset(sample_from(11.0, 11.0, 1.0e9), 200);
  CHECK(sim.done());
  CHECK(sim.terminal());
  CHECK(sim.steps() == 0);
}

TEST_CASE("truncation after the step budget") {
  env::Env sim{env::EnvConfig{}};
  sim.reset(sample_from(5.0, 17.0, 2.0e9), 3);
  // walk away from the optimum so it cannot terminate
  (void)sim.step(env::Action{7});
  (void)sim.step(env::Action{7});
  const auto out = sim.step(env::Action{7});
  CHECK(out.truncated);
  CHECK(!out.terminal);
  CHECK(sim.done());
}

TEST_CASE("capacitors never leave the box under random actions") {
  env::Env sim{env::EnvConfig{}};
  auto rng = rng::derive(5, 200);
  for (int episode = 0; episode < 5; ++episode) {
    sim.reset(sample_from(6.5, 15.5, 1.9e9), 400);
    while (!sim.done()) {
      sim.step(env::Action{static_cast<int>(rng.next_below(8))});
      REQUIRE(sim.cp() >= 0.5e-12);
      REQUIRE(sim.cp() <= 21e-12);
      REQUIRE(sim.cs() >= 0.5e-12);
      REQUIRE(sim.cs() <= 21e-12);
      const auto s = sim.observe();
      REQUIRE(s.cp_norm >= 0.0);
      REQUIRE(s.cp_norm <= 1.0);
      REQUIRE((sim.done() || sim.gamma() >= sim.config().eps_threshold));
    }
    CHECK((sim.terminal() == (sim.gamma() < 0.01)));
  }
}

TEST_CASE("action table is the lexicographic 8-way layout") {
  REQUIRE(env::Action::kCount == 8);
  const int expected[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                              {0, 1},  {1, -1}, {1, 0},  {1, 1}};
  for (int i = 0; i < 8; ++i) {
    CHECK(env::Action{i}.dcp() == expected[i][0]);
    CHECK(env::Action{i}.dcs() == expected[i][1]);
    CHECK(!(expected[i][0] == 0 && expected[i][1] == 0));
  }
}

TEST_CASE("config validation") {
  env::EnvConfig bad;
  bad.cap_init = 30e-12;
  CHECK_THROWS_AS(env::Env{bad}, std::invalid_argument);
  env::EnvConfig sim_cfg;
  env::Env sim{sim_cfg};
  CHECK_THROWS_AS(sim.observe(), std::logic_error);
  auto s = sample_from(8.0, 8.0, 1.2e9);
  s.f = 5e9;  // outside the normalization band
  CHECK_THROWS_AS(sim.reset(s, 100), std::invalid_argument);
}
