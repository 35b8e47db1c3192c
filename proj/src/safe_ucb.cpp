#include "arteo/safe_ucb.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "arteo/errors.hpp"

namespace arteo {

SafeUcbState init_safe_ucb_state(const TrackingScenario& scenario, const RunOptions& opts) {
  const int d = scenario.decision_dim();
  const auto& cfg = scenario.config();
  SafeUcbState state(cfg.kernels.front(), cfg.gp_noise_variance);
  state.confidence = opts.confidence;
  state.beta_override = opts.beta_override;
  state.solver = opts.solver;
  state.solver_seed_root = opts.seed;
  state.noise = Rng(derive_seed(opts.seed, "noise"));

  // Matched bootstrap: identical streams to the adaptive tracker, so for equal
  // root seeds both algorithms start from the same measured inputs.
  Rng seed_draw(derive_seed(opts.seed, "safe_seed", 0));
  Rng seed_noise(derive_seed(opts.seed, "safe_seed", 1));
  const SafeSet seed = scenario.draw_safe_seed(seed_draw, seed_noise);
  state.trace.safe_seed = seed;

  const double goal0 = scenario.reference().at(0);
  const double limit = scenario.safety_limit();
  const size_t n_seed = seed.front().size();
  for (size_t k = 0; k < n_seed; ++k) {
    Eigen::VectorXd point(d);
    double measured = 0.0;
    for (int i = 0; i < d; ++i) {
      point[i] = seed[static_cast<size_t>(i)][k].input[0];
      measured += seed[static_cast<size_t>(i)][k].value;
    }
    state.history_f.push_back({point, std::abs(goal0 - measured)});
    state.history_g.push_back({point, limit - measured});
  }
  state.last_decision = state.history_f.front().input;
  state.trace.algorithm = "safe_ucb";
  state.trace.seed = opts.seed;
  return state;
}

Eigen::VectorXd safe_ucb_step(SafeUcbState& state, double goal,
                              const TrackingScenario& scenario) {
  const int d = scenario.decision_dim();
  const double gp_noise = scenario.config().gp_noise_variance;
  const KernelSpec& kernel = scenario.config().kernels.front();

  state.model_f = GaussianProcess(kernel, gp_noise, state.history_f);
  state.model_g = GaussianProcess(kernel, gp_noise, state.history_g);
  const double gamma = std::max(information_gain(state.model_f.gram(), gp_noise),
                                information_gain(state.model_g.gram(), gp_noise));
  state.confidence.gamma_running = gamma;
  const double beta_t =
      state.beta_override ? *state.beta_override : beta(state.confidence);

  DecisionProblem problem;
  problem.lower = scenario.config().lower;
  problem.upper = scenario.config().upper;
  problem.objective = [&](const Eigen::VectorXd& x) {
    const Prediction p = state.model_f.predict(x);
    return p.mean - beta_t * p.std;
  };
  problem.constraints.push_back([&](const Eigen::VectorXd& x) {
    const Prediction p = state.model_g.predict(x);
    return -(p.mean - beta_t * p.std);  // feasible iff the pessimistic slack >= 0
  });

  SolverSettings solver = state.solver;
  solver.seed = derive_seed(state.solver_seed_root, "solver", static_cast<uint64_t>(state.t));
  const SolveResult result = minimize(problem, state.last_decision, solver);

  const bool hold = result.status == SolveStatus::Infeasible;
  const Eigen::VectorXd decision = hold ? state.last_decision : result.point;

  TraceRow row;
  row.t = state.t;
  row.goal = goal;
  row.decision = decision;
  row.z = 0.0;
  row.beta = beta_t;
  row.gamma = gamma;
  row.solver_status = result.status;
  row.solver_iterations = result.iterations;
  row.safety_hold = hold;

  // No per-unknown surrogates exist here; those slots stay NaN while the
  // per-unknown measurements and truths are still real.
  row.mu.assign(static_cast<size_t>(d), std::numeric_limits<double>::quiet_NaN());
  row.sigma.assign(static_cast<size_t>(d), std::numeric_limits<double>::quiet_NaN());
  row.y.resize(static_cast<size_t>(d));
  row.true_values.resize(static_cast<size_t>(d));
  double measured = 0.0;
  for (int i = 0; i < d; ++i) {
    row.true_values[static_cast<size_t>(i)] = scenario.true_value(i, decision[i]);
    const double y = scenario.observe(i, decision[i], state.noise);
    row.y[static_cast<size_t>(i)] = y;
    measured += y;
  }
  row.produced_pred = scenario.safety_limit() - state.model_g.predict(decision).mean;
  row.produced_true = scenario.produced_true(decision);
  row.constraint_margin = scenario.safety_limit() - row.produced_true;
  row.regret = scenario.regret(goal, row.produced_true);
  state.trace.rows.push_back(std::move(row));

  state.history_f.push_back({decision, std::abs(goal - measured)});
  state.history_g.push_back({decision, scenario.safety_limit() - measured});
  state.t += 1;
  state.last_decision = decision;
  return decision;
}

RunTrace run_safe_ucb(const TrackingScenario& scenario, const RunOptions& opts) {
  const int horizon = opts.horizon > 0 ? opts.horizon : scenario.reference().horizon();
  if (horizon < 1) throw std::invalid_argument("run horizon must be at least 1");
  const ReferenceSignal ref = horizon > scenario.reference().horizon()
                                  ? scenario.reference().tiled(horizon)
                                  : scenario.reference();

  SafeUcbState state = init_safe_ucb_state(scenario, opts);
  for (int t = 0; t < horizon; ++t) {
    const auto begin = std::chrono::steady_clock::now();
    try {
      safe_ucb_step(state, ref.at(t), scenario);
    } catch (const std::exception& e) {
      state.trace.partial = true;
      state.trace.abort_reason = e.what();
      break;
    }
    state.trace.rows.back().step_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  }
  return std::move(state.trace);
}

}  // namespace arteo
