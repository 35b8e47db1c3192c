#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "arteo/motor.hpp"
#include "arteo/rng.hpp"
#include "arteo/scenario.hpp"
#include "doctest.h"

using namespace arteo;

TEST_CASE("reference signal indexes piecewise-constant segments") {
  const ReferenceSignal ref({{10, 150.0}});
  CHECK(ref.horizon() == 10);
  CHECK(ref.at(3) == 150.0);

  const ReferenceSignal two({{5, 100.0}, {5, 240.0}});
  CHECK(two.at(4) == 100.0);
  CHECK(two.at(5) == 240.0);
  CHECK(two.at(7) == 240.0);
  CHECK_THROWS_AS(two.at(10), std::out_of_range);
  CHECK_THROWS_AS(ReferenceSignal({{0, 1.0}}), std::invalid_argument);
}

TEST_CASE("tiling repeats a profile to cover longer horizons") {
  const ReferenceSignal ref({{2, 1.0}, {3, 2.0}});
  const ReferenceSignal longer = ref.tiled(12);
  CHECK(longer.horizon() >= 12);
  for (int t = 0; t < 12; ++t) CHECK(longer.at(t) == ref.at(t % 5));
}

TEST_CASE("reference csv loads duration,level rows and rejects bad lines") {
  std::istringstream good("duration,level\n8,120\n8,180\n");
  const ReferenceSignal ref = load_reference_csv(good);
  CHECK(ref.horizon() == 16);
  CHECK(ref.at(0) == 120.0);
  CHECK(ref.at(8) == 180.0);

  std::istringstream bad("8,120\nnope,5\n");
  try {
    load_reference_csv(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("default profile has five plateaus and an unreachable level") {
  const ReferenceSignal ref = default_motor_reference();
  CHECK(ref.horizon() == 40);
  CHECK(ref.segments().size() == 5);
  bool any_above_limit = false;
  for (const auto& [len, level] : ref.segments()) {
    CHECK(len == 8);
    any_above_limit = any_above_limit || level > 225.6;
  }
  CHECK(any_above_limit);
}

TEST_CASE("steady-state current is torque over flux") {
  CHECK(true_current(machine_one(), 0.0) == 0.0);
  CHECK(true_current(machine_one(), 16.5) == doctest::Approx(100.0).epsilon(1e-12));
  // The top of the range breaches 225.6 within a single machine.
  CHECK(true_current(machine_one(), 38.0) == doctest::Approx(230.30303030303028).epsilon(1e-12));
  CHECK_THROWS_AS(true_current(machine_one(), -0.1), std::out_of_range);
  CHECK_THROWS_AS(true_current(machine_one(), 38.5), std::out_of_range);
}

TEST_CASE("current map is strictly increasing for both machines") {
  for (const MotorParams& m : {machine_one(), machine_two()}) {
    double prev = -1.0;
    for (double t = 0.0; t <= 38.0; t += 1.0) {
      const double i = true_current(m, t);
      CHECK(i > prev);
      prev = i;
    }
  }
}

TEST_CASE("goal-tracking objective and safety constraint arithmetic") {
  // Unconditioned unit-variance models make mu = 0 and sigma = 1 per unknown.
  KernelSpec spec;
  std::vector<GaussianProcess> priors = {GaussianProcess(spec, 0.1),
                                         GaussianProcess(spec, 0.1)};
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  // (Cr - mu_sum)^2 - z * sigma_sum with mu_sum 0, sigma_sum 2.
  CHECK(motor_objective(x, priors, 10.0, 0.0) == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(motor_objective(x, priors, 10.0, 25.0) == doctest::Approx(50.0).epsilon(1e-9));
  // mu_sum + beta * sigma_sum - limit = 0 + 2*2 - 225.6.
  CHECK(motor_safety(x, priors, 2.0) == doctest::Approx(4.0 - 225.6).epsilon(1e-9));
  CHECK(motor_safety(x, priors, 2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("regret measures distance to the achievable target") {
  CHECK(tracking_regret(100.0, 95.0, 225.6) == doctest::Approx(5.0));
  CHECK(tracking_regret(100.0, 100.0, 225.6) == 0.0);
  // Unreachable goals clip to the limit first.
  CHECK(tracking_regret(240.0, 225.0, 225.6) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("motor scenario wires two machines behind one produced total") {
  const TrackingScenario scenario = make_motor_scenario();
  CHECK(scenario.decision_dim() == 2);
  CHECK(scenario.safety_limit() == 225.6);
  Eigen::VectorXd x(2);
  x << 16.5, 16.5;
  CHECK(scenario.produced_true(x) == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(scenario.true_value(0, 16.5) == doctest::Approx(100.0).epsilon(1e-12));

  const auto inputs = scenario.model_inputs(x);
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0][0] == 16.5);
  CHECK(inputs[1][0] == 16.5);

  Rng noise(1);
  double acc = 0.0;
  for (int i = 0; i < 2000; ++i) acc += scenario.observe(0, 16.5, noise) - 100.0;
  CHECK(std::abs(acc / 2000.0) < 0.1);  // noise is zero-mean with std 1
}

TEST_CASE("exploration gate needs a repeated goal satisfied within the margin") {
  const TrackingScenario scenario = make_motor_scenario();
  CHECK(scenario.exploration_rule(true, 120.0, 123.0, 120.0));
  CHECK_FALSE(scenario.exploration_rule(false, 120.0, 120.0, 120.0));  // no history yet
  CHECK_FALSE(scenario.exploration_rule(true, 120.0, 126.0, 120.0));   // outside margin
  CHECK_FALSE(scenario.exploration_rule(true, 120.0, 121.0, 180.0));   // goal changed
}

TEST_CASE("fixed bootstrap inputs are validated against the true limit") {
  MotorScenarioOptions opts;
  opts.fixed_seed_inputs = {38.0, 6.0};  // 38 Nm alone draws 230.3 A
  const TrackingScenario scenario = make_motor_scenario(opts);
  Rng draw(1), noise(2);
  CHECK_THROWS_AS(scenario.draw_safe_seed(draw, noise), std::invalid_argument);

  Rng draw2(1), noise2(2);
  const SafeSet seed = make_motor_scenario().draw_safe_seed(draw2, noise2);
  REQUIRE(seed.size() == 2);
  CHECK(seed[0].size() == 2);
  CHECK(seed[0][0].input[0] == 2.0);
  CHECK(seed[0][1].input[0] == 6.0);
}

TEST_CASE("safe seed draws are reproducible per generator state") {
  MotorScenarioOptions opts;
  opts.fixed_seed_inputs.clear();  // fall back to uniform draws
  const TrackingScenario scenario = make_motor_scenario(opts);
  Rng draw_a(9), noise_a(10), draw_b(9), noise_b(10);
  const SafeSet a = scenario.draw_safe_seed(draw_a, noise_a);
  const SafeSet b = scenario.draw_safe_seed(draw_b, noise_b);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].size() == b[i].size());
    for (size_t j = 0; j < a[i].size(); ++j) {
      CHECK(a[i][j].input == b[i][j].input);
      CHECK(a[i][j].value == b[i][j].value);
    }
  }
}

TEST_CASE("toy sandbox uses one linear unknown") {
  const TrackingScenario toy = make_toy_scenario();
  CHECK(toy.decision_dim() == 1);
  CHECK(toy.safety_limit() == 7.0);
  CHECK(toy.true_value(0, 5.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(toy.true_value(0, 11.0), std::out_of_range);
}
