#include "arteo/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arteo {

namespace {

std::vector<uint64_t> hyperopt_seeds(uint64_t root, int n) {
  std::vector<uint64_t> seeds(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    seeds[static_cast<size_t>(i)] = derive_seed(root, "hyperopt_seed", static_cast<uint64_t>(i));
  return seeds;
}

double terminal_regret(const TrackingScenario& scenario, const RunOptions& opts) {
  const RunTrace trace = run_arteo(scenario, opts);
  if (trace.rows.empty()) throw std::runtime_error("run produced no steps");
  return cumulative_regret(trace).back();
}

}  // namespace

GridZResult grid_search_z(const std::vector<double>& candidates,
                          const TrackingScenario& scenario, const RunOptions& base,
                          int n_seeds) {
  if (candidates.empty()) throw std::invalid_argument("no exploration-weight candidates");
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  GridZResult result;
  result.seeds = hyperopt_seeds(base.seed, n_seeds);
  bool have_best = false;
  double best_value = 0.0;
  for (double z : candidates) {
    GridZRow row;
    row.z = z;
    for (uint64_t seed : result.seeds) {
      RunOptions opts = base;
      opts.zeta = z;
      opts.seed = seed;
      row.per_seed_regret.push_back(terminal_regret(scenario, opts));
    }
    double sum = 0.0;
    for (double r : row.per_seed_regret) sum += r;
    row.mean_terminal_regret = sum / static_cast<double>(n_seeds);
    if (!have_best || row.mean_terminal_regret < best_value ||
        (row.mean_terminal_regret == best_value && z < result.best_z)) {
      result.best_z = z;
      best_value = row.mean_terminal_regret;
      have_best = true;
    }
    result.table.push_back(std::move(row));
  }
  return result;
}

BayesOptResult bayesopt_minimize(const std::function<double(double)>& objective, double lo,
                                 double hi, int budget, uint64_t /*seed*/) {
  if (!(lo < hi)) throw std::invalid_argument("search interval needs lo < hi");
  if (budget < 3) throw std::invalid_argument("budget must be at least 3");
  const int cap = std::min(budget, 35);
  constexpr int kGrid = 512;
  constexpr double kKappa = 2.0;
  constexpr double kDedupe = 1e-9;

  BayesOptResult result;
  const auto evaluate = [&](double x) {
    const double v = objective(x);
    if (!std::isfinite(v)) throw std::runtime_error("objective returned a non-finite value");
    result.evaluated.push_back({x, v});
    const double best =
        result.incumbent_values.empty() ? v : std::min(result.incumbent_values.back(), v);
    result.incumbent_values.push_back(best);
  };

  evaluate(lo);
  evaluate(0.5 * (lo + hi));
  evaluate(hi);

  result.grid.resize(kGrid);
  for (int g = 0; g < kGrid; ++g)
    result.grid[static_cast<size_t>(g)] =
        lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kGrid - 1);

  KernelSpec surrogate_kernel;
  surrogate_kernel.family = KernelFamily::SquaredExponential;
  surrogate_kernel.length_scale = (hi - lo) / 8.0;
  surrogate_kernel.signal_variance = 1.0;
  constexpr double kSurrogateNoise = 1e-6;

  const auto fit = [&]() {
    double mean = 0.0;
    for (const auto& p : result.evaluated) mean += p.value;
    mean /= static_cast<double>(result.evaluated.size());
    double var = 0.0;
    for (const auto& p : result.evaluated) var += (p.value - mean) * (p.value - mean);
    var /= static_cast<double>(result.evaluated.size());
    const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
    std::vector<Observation> data;
    data.reserve(result.evaluated.size());
    for (const auto& p : result.evaluated) {
      Eigen::VectorXd in(1);
      in[0] = p.x;
      data.push_back({in, (p.value - mean) / scale});
    }
    struct Fit {
      GaussianProcess gp;
      double mean, scale;
    };
    return Fit{GaussianProcess(surrogate_kernel, kSurrogateNoise, std::move(data)), mean,
               scale};
  };

  while (static_cast<int>(result.evaluated.size()) < cap) {
    const auto model = fit();
    double best_acq = 0.0, best_x = 0.0;
    bool found = false;
    for (double gx : result.grid) {
      bool seen = false;
      for (const auto& p : result.evaluated)
        if (std::abs(p.x - gx) <= kDedupe) {
          seen = true;
          break;
        }
      if (seen) continue;
      Eigen::VectorXd in(1);
      in[0] = gx;
      const Prediction p = model.gp.predict(in);
      const double acq = p.mean - kKappa * p.std;
      if (!found || acq < best_acq) {  // strict <, so ties keep the smaller x
        best_acq = acq;
        best_x = gx;
        found = true;
      }
    }
    if (!found) break;  // grid exhausted
    evaluate(best_x);
  }

  const auto model = fit();
  result.surrogate_mean.resize(result.grid.size());
  result.surrogate_lower.resize(result.grid.size());
  result.surrogate_upper.resize(result.grid.size());
  for (size_t g = 0; g < result.grid.size(); ++g) {
    Eigen::VectorXd in(1);
    in[0] = result.grid[g];
    const Prediction p = model.gp.predict(in);
    const double mean = model.mean + model.scale * p.mean;
    const double width = kKappa * model.scale * p.std;
    result.surrogate_mean[g] = mean;
    result.surrogate_lower[g] = mean - width;
    result.surrogate_upper[g] = mean + width;
  }

  result.best_value = result.incumbent_values.back();
  for (const auto& p : result.evaluated)
    if (p.value == result.best_value) {
      result.best_x = p.x;
      break;  // earliest evaluation wins among exact ties
    }
  return result;
}

BayesOptResult bayesopt_z(double lo, double hi, int budget,
                          const TrackingScenario& scenario, const RunOptions& base,
                          int n_seeds) {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  const auto seeds = hyperopt_seeds(base.seed, n_seeds);
  const auto objective = [&](double z) {
    double sum = 0.0;
    for (uint64_t seed : seeds) {
      RunOptions opts = base;
      opts.zeta = z;
      opts.seed = seed;
      sum += terminal_regret(scenario, opts);
    }
    return sum / static_cast<double>(n_seeds);
  };
  return bayesopt_minimize(objective, lo, hi, budget, base.seed);
}

ComplexityResult complexity_probe(const TrackingScenario& scenario,
                                  const std::vector<int>& horizons, const RunOptions& base) {
  if (horizons.empty()) throw std::invalid_argument("no horizons to probe");
  for (size_t i = 0; i + 1 < horizons.size(); ++i)
    if (horizons[i] >= horizons[i + 1])
      throw std::invalid_argument("horizons must be strictly increasing");
  if (horizons.front() < 2) throw std::invalid_argument("horizons must be at least 2");

  ComplexityResult result;
  for (int h : horizons) {
    RunOptions opts = base;
    opts.horizon = h;
    const RunTrace trace = run_arteo(scenario, opts);
    if (static_cast<int>(trace.rows.size()) != h)
      throw std::runtime_error("probe run ended early at horizon " + std::to_string(h));
    // The second half of the run reflects the per-step cost near t = horizon,
    // where the conditioning-set size dominates.
    double sum = 0.0;
    int n = 0;
    for (size_t t = trace.rows.size() / 2; t < trace.rows.size(); ++t) {
      sum += trace.rows[t].step_seconds;
      ++n;
    }
    result.rows.push_back({h, sum / static_cast<double>(n)});
  }

  if (result.rows.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(result.rows.size());
    for (const ComplexityRow& row : result.rows) {
      if (row.mean_step_seconds <= 0.0)
        throw std::runtime_error("unusable timing sample at horizon " +
                                 std::to_string(row.horizon));
      const double x = std::log(static_cast<double>(row.horizon));
      const double y = std::log(row.mean_step_seconds);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    result.slope_defined = true;
  }
  return result;
}

}  // namespace arteo
