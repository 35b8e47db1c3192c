#include <cmath>

#include <Eigen/Dense>

#include "arteo/core.hpp"
#include "arteo/motor.hpp"
#include "doctest.h"

using namespace arteo;

namespace {

RunOptions toy_options(uint64_t seed, double zeta) {
  RunOptions opts;
  opts.seed = seed;
  opts.zeta = zeta;
  opts.beta_override = 3.0;
  return opts;
}

}  // namespace

TEST_CASE("weighted objective is cost minus the exploration bonus") {
  CHECK(arteo_cost(5.0, 2.0, 0.0) == 5.0);
  CHECK(arteo_cost(10.0, 2.0, 25.0) == doctest::Approx(-40.0).epsilon(1e-14));
  double prev = arteo_cost(1.0, 0.5, 0.0);
  for (double z : {1.0, 5.0, 50.0}) {
    const double v = arteo_cost(1.0, 0.5, z);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("uncertainty term sums per-model stds at their own inputs") {
  KernelSpec spec;
  const std::vector<GaussianProcess> priors = {GaussianProcess(spec, 0.1),
                                               GaussianProcess(spec, 0.1)};
  Eigen::VectorXd x(2);
  x << 3.0, -1.0;
  CHECK(uncertainty_term(priors, x) == doctest::Approx(2.0).epsilon(1e-14));

  Eigen::VectorXd p0(1), p1(1);
  p0 << 1.0;
  p1 << 2.0;
  const std::vector<GaussianProcess> models = {
      GaussianProcess(spec, 0.05, {{p0, 1.0}, {p1, 0.5}}),
      GaussianProcess(spec, 0.05, {{p1, -0.3}})};
  Eigen::VectorXd q(2);
  q << 0.4, 1.7;
  const double expect = models[0].predict((Eigen::VectorXd(1) << 0.4).finished()).std +
                        models[1].predict((Eigen::VectorXd(1) << 1.7).finished()).std;
  CHECK(uncertainty_term(models, q) == doctest::Approx(expect).epsilon(1e-12));

  // At a (noiseless-ish) datum of every model the summed std nearly vanishes.
  const std::vector<GaussianProcess> tight = {
      GaussianProcess(spec, 0.0, {{p0, 1.0}}), GaussianProcess(spec, 0.0, {{p1, 2.0}})};
  Eigen::VectorXd at(2);
  at << 1.0, 2.0;
  CHECK(uncertainty_term(tight, at) < 1e-3);
}

TEST_CASE("fresh run state starts from the bootstrap observations") {
  const TrackingScenario toy = make_toy_scenario();
  const RunState state = init_run_state(toy, toy_options(3, 0.0));
  REQUIRE(state.safe_set.size() == 1);
  CHECK(state.safe_set[0].size() == 2);
  CHECK(state.last_decision[0] == state.safe_set[0][0].input[0]);
  CHECK(state.models[0].size() == 0);  // conditioning happens inside the step
  CHECK(state.t == 0);
}

TEST_CASE("safe sets grow by exactly one observation per unknown per step") {
  const TrackingScenario toy = make_toy_scenario();
  RunOptions opts = toy_options(5, 1.0);
  const RunTrace trace = run_arteo(toy, opts);
  REQUIRE(trace.rows.size() == 12);
  CHECK_FALSE(trace.partial);
  REQUIRE(trace.safe_seed.size() == 1);
  CHECK(trace.safe_seed[0].size() == 2);

  RunState state = init_run_state(toy, opts);
  for (int t = 0; t < 5; ++t) {
    arteo_step(state, toy.reference().at(t), toy);
    for (const auto& set : state.safe_set)
      CHECK(static_cast<int>(set.size()) == 2 + t + 1);
  }
}

TEST_CASE("exploration weight is never anything but zero or zeta") {
  const TrackingScenario toy = make_toy_scenario();
  const RunTrace trace = run_arteo(toy, toy_options(7, 13.5));
  bool saw_on = false, saw_off = false;
  for (const TraceRow& row : trace.rows) {
    CHECK((row.z == 0.0 || row.z == 13.5));
    saw_on = saw_on || row.z == 13.5;
    saw_off = saw_off || row.z == 0.0;
  }
  CHECK(saw_on);   // constant reachable goal opens the gate
  CHECK(saw_off);  // the first step has no history
}

TEST_CASE("gate that never opens pins z at zero") {
  const TrackingScenario toy = make_toy_scenario();
  RunOptions opts = toy_options(7, 13.5);
  RunState state = init_run_state(toy, opts);
  state.policy.rule = [](const RunState&, double) { return false; };
  for (int t = 0; t < toy.reference().horizon(); ++t)
    arteo_step(state, toy.reference().at(t), toy);
  for (const TraceRow& row : state.trace.rows) CHECK(row.z == 0.0);
}

TEST_CASE("every emitted decision satisfies the surrogate safety bound") {
  const TrackingScenario toy = make_toy_scenario();
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const RunTrace trace = run_arteo(toy, toy_options(seed, 5.0));
    for (const TraceRow& row : trace.rows) {
      if (row.safety_hold) continue;
      double optimistic = 0.0;
      for (size_t i = 0; i < row.mu.size(); ++i)
        optimistic += row.mu[i] + row.beta * row.sigma[i];
      CHECK(optimistic <= toy.safety_limit() + 1e-5);
    }
  }
}

TEST_CASE("with no exploration a constant reachable goal converges quickly") {
  const TrackingScenario toy = make_toy_scenario();
  const RunTrace trace = run_arteo(toy, toy_options(11, 0.0));
  bool settled = false;
  for (size_t t = 1; t < trace.rows.size() && t <= 10; ++t) {
    const double step =
        (trace.rows[t].decision - trace.rows[t - 1].decision).lpNorm<Eigen::Infinity>();
    if (step < 1e-3) {
      settled = true;
      break;
    }
  }
  CHECK(settled);
}

TEST_CASE("identical options reproduce the trace exactly") {
  const TrackingScenario toy = make_toy_scenario();
  const RunTrace a = run_arteo(toy, toy_options(21, 8.0));
  const RunTrace b = run_arteo(toy, toy_options(21, 8.0));
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t t = 0; t < a.rows.size(); ++t) {
    CHECK(a.rows[t].decision == b.rows[t].decision);
    CHECK(a.rows[t].y == b.rows[t].y);
    CHECK(a.rows[t].z == b.rows[t].z);
    CHECK(a.rows[t].regret == b.rows[t].regret);
  }
}

TEST_CASE("a single-step run conditions only on the bootstrap set") {
  const TrackingScenario toy = make_toy_scenario();
  RunOptions opts = toy_options(2, 0.0);
  opts.horizon = 1;
  const RunTrace trace = run_arteo(toy, opts);
  REQUIRE(trace.rows.size() == 1);
  CHECK(trace.rows[0].t == 0);
  // gamma behind step 0 comes from the two bootstrap points only
  CHECK(trace.rows[0].gamma > 0.0);
}

TEST_CASE("the emitted decision matches an exhaustive scan of the same problem") {
  const TrackingScenario toy = make_toy_scenario();
  RunOptions opts = toy_options(4, 6.0);
  RunState state = init_run_state(toy, opts);
  for (int t = 0; t < 4; ++t) {
    const double goal = toy.reference().at(t);
    arteo_step(state, goal, toy);
    const TraceRow& row = state.trace.rows.back();
    if (row.safety_hold) continue;
    // state.models still hold the models this step solved against.
    DecisionProblem problem;
    problem.lower = toy.config().lower;
    problem.upper = toy.config().upper;
    problem.objective = [&](const Eigen::VectorXd& x) {
      return arteo_cost(toy.cost(state.models, x, goal), uncertainty_term(state.models, x),
                        row.z);
    };
    problem.constraints.push_back(toy.safety_constraint(state.models, row.beta));
    const SolveResult best = grid_oracle(problem, 0.002);
    CHECK(problem.objective(row.decision) <= best.value + 0.01);
  }
}
