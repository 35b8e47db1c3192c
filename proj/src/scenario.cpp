#include "arteo/scenario.hpp"

#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>

#include "arteo/confidence.hpp"
#include "arteo/errors.hpp"

namespace arteo {

ReferenceSignal::ReferenceSignal(std::vector<std::pair<int, double>> segments)
    : segments_(std::move(segments)) {
  for (const auto& [len, level] : segments_) {
    if (len <= 0) throw std::invalid_argument("reference segment length must be positive");
    if (!std::isfinite(level)) throw std::invalid_argument("reference level must be finite");
    horizon_ += len;
  }
}

double ReferenceSignal::at(int t) const {
  if (t < 0 || t >= horizon_)
    throw std::out_of_range("reference step " + std::to_string(t) + " outside horizon " +
                            std::to_string(horizon_));
  int acc = 0;
  for (const auto& [len, level] : segments_) {
    acc += len;
    if (t < acc) return level;
  }
  throw std::logic_error("reference bookkeeping is inconsistent");  // unreachable
}

ReferenceSignal load_reference_csv(std::istream& in) {
  std::vector<std::pair<int, double>> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line == "duration,level") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("reference csv line " + std::to_string(line_no) +
                               ": expected 'duration,level'");
    size_t used = 0;
    long duration = 0;
    double level = 0.0;
    try {
      duration = std::stol(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing characters");
      level = std::stod(line.substr(comma + 1), &used);
      if (used != line.size() - comma - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("reference csv line " + std::to_string(line_no) +
                               ": malformed row '" + line + "'");
    }
    if (duration < 1 || !std::isfinite(level) || level < 0.0)
      throw std::runtime_error("reference csv line " + std::to_string(line_no) +
                               ": need duration >= 1 and level >= 0");
    segments.emplace_back(static_cast<int>(duration), level);
  }
  if (segments.empty()) throw std::runtime_error("reference csv has no segments");
  return ReferenceSignal(std::move(segments));
}

ReferenceSignal ReferenceSignal::tiled(int steps) const {
  if (steps <= 0) throw std::invalid_argument("tiled step count must be positive");
  if (horizon_ == 0) throw std::invalid_argument("cannot tile an empty reference");
  std::vector<std::pair<int, double>> out;
  int covered = 0;
  while (covered < steps) {
    for (const auto& seg : segments_) {
      out.push_back(seg);
      covered += seg.first;
    }
  }
  return ReferenceSignal(std::move(out));
}

TrackingScenario::TrackingScenario(Config cfg) : cfg_(std::move(cfg)) {
  const int d = static_cast<int>(cfg_.characteristics.size());
  if (d == 0) throw std::invalid_argument("scenario needs at least one unknown");
  if (cfg_.lower.size() != d || cfg_.upper.size() != d)
    throw DimensionError(d, static_cast<int>(cfg_.lower.size()), "scenario decision box");
  if (static_cast<int>(cfg_.kernels.size()) != d)
    throw DimensionError(d, static_cast<int>(cfg_.kernels.size()), "scenario kernels");
  for (int i = 0; i < d; ++i) {
    if (!(cfg_.lower[i] < cfg_.upper[i]))
      throw std::invalid_argument("decision box must have lower < upper in every component");
    cfg_.kernels[static_cast<size_t>(i)].validate();
  }
  if (cfg_.noise_std < 0.0) throw std::invalid_argument("noise_std must be nonnegative");
  if (cfg_.gp_noise_variance <= 0.0)
    throw std::invalid_argument("gp_noise_variance must be positive");
  if (cfg_.reference.horizon() == 0) throw std::invalid_argument("scenario needs a reference");
  if (cfg_.seed_count < 1) throw std::invalid_argument("seed_count must be at least 1");
  if (!cfg_.fixed_seed_inputs.empty() &&
      static_cast<int>(cfg_.fixed_seed_inputs.size()) != cfg_.seed_count)
    throw std::invalid_argument("fixed_seed_inputs length must equal seed_count");
  if (cfg_.fixed_seed_inputs.empty() && !(cfg_.seed_lo < cfg_.seed_hi))
    throw std::invalid_argument("seed range must have seed_lo < seed_hi");
}

double TrackingScenario::true_value(int unknown, double x) const {
  if (unknown < 0 || unknown >= decision_dim())
    throw std::out_of_range("unknown index " + std::to_string(unknown) + " out of range");
  const double lo = cfg_.lower[unknown], hi = cfg_.upper[unknown];
  if (!(x >= lo && x <= hi))
    throw std::out_of_range("input " + std::to_string(x) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  return cfg_.characteristics[static_cast<size_t>(unknown)](x);
}

double TrackingScenario::produced_true(const Eigen::VectorXd& decision) const {
  if (decision.size() != decision_dim())
    throw DimensionError(decision_dim(), static_cast<int>(decision.size()), "produced_true");
  double total = 0.0;
  for (int i = 0; i < decision_dim(); ++i) total += true_value(i, decision[i]);
  return total;
}

double TrackingScenario::observe(int unknown, double x, Rng& noise) const {
  return true_value(unknown, x) + noise.gaussian(0.0, cfg_.noise_std);
}

std::vector<Eigen::VectorXd> TrackingScenario::model_inputs(
    const Eigen::VectorXd& decision) const {
  if (decision.size() != decision_dim())
    throw DimensionError(decision_dim(), static_cast<int>(decision.size()), "model_inputs");
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(decision_dim()));
  for (int i = 0; i < decision_dim(); ++i) {
    Eigen::VectorXd v(1);
    v[0] = decision[i];
    out[static_cast<size_t>(i)] = v;
  }
  return out;
}

SafeSet TrackingScenario::draw_safe_seed(Rng& draw, Rng& noise) const {
  const int d = decision_dim();
  std::vector<double> inputs;
  if (!cfg_.fixed_seed_inputs.empty()) {
    inputs = cfg_.fixed_seed_inputs;
  } else {
    inputs.resize(static_cast<size_t>(cfg_.seed_count));
    for (auto& v : inputs) v = draw.uniform(cfg_.seed_lo, cfg_.seed_hi);
  }
  // A seed input must be harmless even if every other unknown sits at its
  // cheapest setting; otherwise the bootstrap itself would breach the limit.
  for (double x : inputs) {
    for (int i = 0; i < d; ++i) {
      double total = true_value(i, x);
      for (int j = 0; j < d; ++j)
        if (j != i) total += true_value(j, cfg_.lower[j]);
      if (total > cfg_.safety_limit)
        throw std::invalid_argument("seed input " + std::to_string(x) +
                                    " is unsafe for unknown " + std::to_string(i));
    }
  }
  SafeSet seed(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (double x : inputs) {
      Eigen::VectorXd v(1);
      v[0] = x;
      seed[static_cast<size_t>(i)].push_back({v, observe(i, x, noise)});
    }
  }
  return seed;
}

Eigen::VectorXd TrackingScenario::initial_decision(const SafeSet& seed) const {
  const int d = decision_dim();
  if (static_cast<int>(seed.size()) != d)
    throw DimensionError(d, static_cast<int>(seed.size()), "initial_decision");
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) {
    const auto& obs = seed[static_cast<size_t>(i)];
    if (obs.empty()) throw std::invalid_argument("seed set for an unknown is empty");
    x[i] = obs.front().input[0];
  }
  return x;
}

double TrackingScenario::produced_mean(const std::vector<GaussianProcess>& models,
                                       const Eigen::VectorXd& decision) const {
  const int d = decision_dim();
  if (static_cast<int>(models.size()) != d)
    throw DimensionError(d, static_cast<int>(models.size()), "produced_mean");
  if (decision.size() != d)
    throw DimensionError(d, static_cast<int>(decision.size()), "produced_mean");
  double total = 0.0;
  Eigen::Matrix<double, 1, 1> v;  // objective hot path: no per-call allocation
  for (int i = 0; i < d; ++i) {
    v[0] = decision[i];
    total += models[static_cast<size_t>(i)].predict(v).mean;
  }
  return total;
}

double TrackingScenario::cost(const std::vector<GaussianProcess>& models,
                              const Eigen::VectorXd& decision, double goal) const {
  const double gap = goal - produced_mean(models, decision);
  return gap * gap;
}

std::function<double(const Eigen::VectorXd&)> TrackingScenario::safety_constraint(
    const std::vector<GaussianProcess>& models, double beta_t) const {
  const int d = decision_dim();
  if (static_cast<int>(models.size()) != d)
    throw DimensionError(d, static_cast<int>(models.size()), "safety_constraint");
  const double limit = cfg_.safety_limit;
  // Each unknown enters the produced total directly, so the monotone form each
  // interval is pushed through is p itself; worst case is the sum of uppers.
  const auto identity = [](double, double p) { return p; };
  return [&models, beta_t, limit, d, identity](const Eigen::VectorXd& x) {
    if (x.size() != d) throw DimensionError(d, static_cast<int>(x.size()), "safety_constraint");
    double worst = 0.0;
    Eigen::Matrix<double, 1, 1> v;  // constraint hot path: no per-call allocation
    for (int i = 0; i < d; ++i) {
      v[0] = x[i];
      const Interval ci = confidence_interval(models[static_cast<size_t>(i)], v, beta_t);
      worst += propagate_bounds(identity, x[i], ci, Monotonicity::Increasing).upper;
    }
    return worst - limit;
  };
}

double TrackingScenario::regret(double goal, double delivered) const {
  return std::abs(std::min(goal, cfg_.safety_limit) - delivered);
}

bool TrackingScenario::exploration_rule(bool has_prev, double prev_goal,
                                        double prev_observed_total, double goal) const {
  if (!has_prev) return false;
  if (prev_goal != goal) return false;
  return std::abs(prev_observed_total - prev_goal) <= cfg_.goal_margin;
}

}  // namespace arteo
