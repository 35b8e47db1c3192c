#include "arteo/core.hpp"

#include <chrono>
#include <cmath>

#include "arteo/errors.hpp"

namespace arteo {

double uncertainty_term(const std::vector<GaussianProcess>& models,
                        const std::vector<Eigen::VectorXd>& inputs) {
  if (models.size() != inputs.size())
    throw DimensionError(static_cast<int>(models.size()), static_cast<int>(inputs.size()),
                         "uncertainty_term");
  double total = 0.0;
  for (size_t i = 0; i < models.size(); ++i) total += models[i].predict(inputs[i]).std;
  return total;
}

double uncertainty_term(const std::vector<GaussianProcess>& models, const Eigen::VectorXd& x) {
  if (static_cast<int>(models.size()) != x.size())
    throw DimensionError(static_cast<int>(models.size()), static_cast<int>(x.size()),
                         "uncertainty_term");
  double total = 0.0;
  Eigen::Matrix<double, 1, 1> v;  // per-component query, kept off the heap
  for (size_t i = 0; i < models.size(); ++i) {
    v[0] = x[static_cast<Eigen::Index>(i)];
    total += models[i].predict(v).std;
  }
  return total;
}

double arteo_cost(double cost_value, double uncertainty, double z) {
  return cost_value - z * uncertainty;
}

RunState init_run_state(const TrackingScenario& scenario, const RunOptions& opts) {
  RunState state;
  state.confidence = opts.confidence;
  state.beta_override = opts.beta_override;
  state.policy.zeta = opts.zeta;
  state.solver = opts.solver;
  state.solver_seed_root = opts.seed;
  state.noise = Rng(derive_seed(opts.seed, "noise"));
  Rng seed_draw(derive_seed(opts.seed, "safe_seed", 0));
  Rng seed_noise(derive_seed(opts.seed, "safe_seed", 1));
  state.safe_set = scenario.draw_safe_seed(seed_draw, seed_noise);
  state.last_decision = scenario.initial_decision(state.safe_set);
  const auto& kernels = scenario.config().kernels;
  state.models.reserve(kernels.size());
  for (const auto& k : kernels)
    state.models.emplace_back(k, scenario.config().gp_noise_variance);
  state.trace.algorithm = "arteo";
  state.trace.seed = opts.seed;
  state.trace.safe_seed = state.safe_set;
  return state;
}

Eigen::VectorXd arteo_step(RunState& state, double goal, const TrackingScenario& scenario) {
  const int d = scenario.decision_dim();
  const double gp_noise = scenario.config().gp_noise_variance;

  const bool explore = state.policy.rule
                           ? state.policy.rule(state, goal)
                           : scenario.exploration_rule(state.has_prev, state.prev_goal,
                                                       state.prev_observed_total, goal);
  const double z = explore ? state.policy.zeta : 0.0;

  // Re-condition on everything seen so far; the width multiplier is driven by
  // the information content of exactly that data (largest budget across the
  // unknowns, the conservative choice).
  double gamma = 0.0;
  for (int i = 0; i < d; ++i) {
    state.models[static_cast<size_t>(i)] = GaussianProcess(
        scenario.config().kernels[static_cast<size_t>(i)], gp_noise,
        state.safe_set[static_cast<size_t>(i)]);
    gamma = std::max(
        gamma, information_gain(state.models[static_cast<size_t>(i)].gram(), gp_noise));
  }
  state.confidence.gamma_running = gamma;
  const double beta_t =
      state.beta_override ? *state.beta_override : beta(state.confidence);

  DecisionProblem problem;
  problem.lower = scenario.config().lower;
  problem.upper = scenario.config().upper;
  problem.objective = [&](const Eigen::VectorXd& x) {
    return arteo_cost(scenario.cost(state.models, x, goal),
                      uncertainty_term(state.models, x), z);
  };
  problem.constraints.push_back(scenario.safety_constraint(state.models, beta_t));

  SolverSettings solver = state.solver;
  solver.seed = derive_seed(state.solver_seed_root, "solver", static_cast<uint64_t>(state.t));
  const SolveResult result = minimize(problem, state.last_decision, solver);

  const bool hold = result.status == SolveStatus::Infeasible;
  const Eigen::VectorXd decision = hold ? state.last_decision : result.point;

  TraceRow row;
  row.t = state.t;
  row.goal = goal;
  row.decision = decision;
  row.z = z;
  row.beta = beta_t;
  row.gamma = gamma;
  row.solver_status = result.status;
  row.solver_iterations = result.iterations;
  row.safety_hold = hold;

  row.mu.resize(static_cast<size_t>(d));
  row.sigma.resize(static_cast<size_t>(d));
  row.y.resize(static_cast<size_t>(d));
  row.true_values.resize(static_cast<size_t>(d));
  double observed_total = 0.0;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd v(1);
    v[0] = decision[i];
    const Prediction p = state.models[static_cast<size_t>(i)].predict(v);
    row.mu[static_cast<size_t>(i)] = p.mean;
    row.sigma[static_cast<size_t>(i)] = p.std;
    row.true_values[static_cast<size_t>(i)] = scenario.true_value(i, decision[i]);
    const double y = scenario.observe(i, decision[i], state.noise);
    row.y[static_cast<size_t>(i)] = y;
    observed_total += y;
    state.safe_set[static_cast<size_t>(i)].push_back({v, y});
  }
  row.produced_pred = scenario.produced_mean(state.models, decision);
  row.produced_true = scenario.produced_true(decision);
  row.constraint_margin = scenario.safety_limit() - row.produced_true;
  row.regret = scenario.regret(goal, row.produced_true);
  state.trace.rows.push_back(std::move(row));

  state.t += 1;
  state.last_decision = decision;
  state.has_prev = true;
  state.prev_goal = goal;
  state.prev_observed_total = observed_total;
  return decision;
}

RunTrace run_arteo(const TrackingScenario& scenario, const RunOptions& opts) {
  const int horizon = opts.horizon > 0 ? opts.horizon : scenario.reference().horizon();
  if (horizon < 1) throw std::invalid_argument("run horizon must be at least 1");
  const ReferenceSignal ref = horizon > scenario.reference().horizon()
                                  ? scenario.reference().tiled(horizon)
                                  : scenario.reference();

  RunState state = init_run_state(scenario, opts);
  for (int t = 0; t < horizon; ++t) {
    const auto begin = std::chrono::steady_clock::now();
    try {
      arteo_step(state, ref.at(t), scenario);
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
