#include "arteo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "arteo/rng.hpp"

namespace arteo {

namespace {

constexpr double kFdStep = 1e-6;       // central-difference step scale
constexpr double kArmijo = 1e-4;       // sufficient-decrease constant
constexpr double kStepFloor = 1e-18;   // line search gives up below this
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

/// Signals that an evaluation returned a non-finite value; aborts the start.
struct NonFiniteEval {
  std::string what;
};

double radical_inverse(int base, uint64_t index) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

Eigen::VectorXd project(const DecisionProblem& p, Eigen::VectorXd x) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

double eval_objective(const DecisionProblem& p, const Eigen::VectorXd& x) {
  const double v = p.objective(x);
  if (!std::isfinite(v)) throw NonFiniteEval{"objective returned non-finite value"};
  return v;
}

double eval_constraint(const DecisionProblem& p, size_t a, const Eigen::VectorXd& x) {
  const double v = p.constraints[a](x);
  if (!std::isfinite(v)) throw NonFiniteEval{"constraint " + std::to_string(a) +
                                             " returned non-finite value"};
  return v;
}

double max_violation(const DecisionProblem& p, const Eigen::VectorXd& x) {
  if (p.constraints.empty()) return kVacuousFeasibility;
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < p.constraints.size(); ++a)
    worst = std::max(worst, eval_constraint(p, a, x));
  return worst;
}

struct AugEval {
  double psi = 0.0;        // augmented Lagrangian value
  double objective = 0.0;  // raw objective at the same point
  double violation = 0.0;  // worst constraint value (kVacuousFeasibility when none)
};

/// Augmented Lagrangian for inequality constraints:
///   f(x) + sum_a [ max(0, lambda_a + rho g_a)^2 - lambda_a^2 ] / (2 rho).
/// One pass also yields the raw objective and the worst constraint, so every
/// line-search probe doubles as a feasibility measurement.
AugEval augmented(const DecisionProblem& p, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& lambda, double rho) {
  AugEval out;
  out.objective = eval_objective(p, x);
  out.psi = out.objective;
  out.violation = p.constraints.empty() ? kVacuousFeasibility
                                        : -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < p.constraints.size(); ++a) {
    const double g = eval_constraint(p, a, x);
    out.violation = std::max(out.violation, g);
    const double m = std::max(0.0, lambda(static_cast<Eigen::Index>(a)) + rho * g);
    out.psi += (m * m - lambda(static_cast<Eigen::Index>(a)) * lambda(static_cast<Eigen::Index>(a))) /
               (2.0 * rho);
  }
  return out;
}

Eigen::VectorXd fd_gradient(const DecisionProblem& p, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& lambda, double rho) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = kFdStep * (1.0 + std::abs(x(i)));
    probe(i) = x(i) + h;
    const double fp = augmented(p, probe, lambda, rho).psi;
    probe(i) = x(i) - h;
    const double fm = augmented(p, probe, lambda, rho).psi;
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

/// Best points seen along a descent path, kept separately for feasible points
/// (by objective, lexicographic ties) and for everything (by violation).
struct IterateBook {
  bool have_feasible = false;
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  bool have_any = false;
  Eigen::VectorXd any_x;
  double any_viol = std::numeric_limits<double>::infinity();

  void record(const Eigen::VectorXd& x, const AugEval& e, double tol_feasibility) {
    if (!have_any || e.violation < any_viol) {
      have_any = true;
      any_x = x;
      any_viol = e.violation;
    }
    if (e.violation <= tol_feasibility &&
        (!have_feasible || e.objective < best_f ||
         (e.objective == best_f && lex_less(x, best_x)))) {
      have_feasible = true;
      best_x = x;
      best_f = e.objective;
    }
  }
};

struct InnerResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool stationary = false;
};

/// Projected-gradient descent on the augmented Lagrangian. Stops at
/// stationarity (projected-gradient displacement below a value-scaled
/// tolerance) or when the iteration budget runs out. Every accepted iterate
/// (the entry point included) is offered to the book, so a good point crossed
/// on the way to a penalty minimum is never lost.
InnerResult inner_descent(const DecisionProblem& p, Eigen::VectorXd x,
                          const Eigen::VectorXd& lambda, double rho, int budget,
                          const SolverSettings& s, IterateBook& book) {
  InnerResult out;
  AugEval here = augmented(p, x, lambda, rho);
  book.record(x, here, s.tol_feasibility);
  double step = 1.0;
  bool have_step = false;
  while (out.iterations < budget) {
    const Eigen::VectorXd grad = fd_gradient(p, x, lambda, rho);
    const Eigen::VectorXd displacement = x - project(p, x - grad);
    if (displacement.lpNorm<Eigen::Infinity>() <=
        s.tol_stationarity * (1.0 + std::abs(here.psi))) {
      out.stationary = true;
      break;
    }
    if (!have_step) {
      step = (1.0 + x.norm()) / (1.0 + grad.norm());
      have_step = true;
    }
    step = std::min(step * 2.0, 1e12);  // optimistic growth, backtracking trims
    bool moved = false;
    while (step >= kStepFloor) {
      Eigen::VectorXd cand = project(p, x - step * grad);
      const AugEval eval_cand = augmented(p, cand, lambda, rho);
      const double decrease = grad.dot(x - cand);
      if (eval_cand.psi <= here.psi - kArmijo * decrease && eval_cand.psi < here.psi) {
        x = std::move(cand);
        here = eval_cand;
        book.record(x, here, s.tol_feasibility);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!moved) {
      out.stationary = true;  // no descent direction at numerical resolution
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

struct StartOutcome {
  Eigen::VectorXd point;
  double value = std::numeric_limits<double>::quiet_NaN();
  double violation = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool converged = false;
  bool failed = false;
  int iterations = 0;
  std::string diagnostic;
};

StartOutcome solve_from(const DecisionProblem& p, Eigen::VectorXd x0, const SolverSettings& s) {
  StartOutcome out;
  try {
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.constraints.size()));
    double rho = s.rho_initial;
    double viol_prev = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x = std::move(x0);
    IterateBook book;

    // Each multiplier round gets a slice of the budget; without the slice a
    // single flat-valley descent can starve every lambda update.
    const int round_budget =
        std::max(1, (s.max_iterations + s.outer_rounds - 1) / s.outer_rounds);

    int used = 0;
    for (int round = 0; round < s.outer_rounds && used < s.max_iterations; ++round) {
      const int budget = std::min(round_budget, s.max_iterations - used);
      InnerResult inner = inner_descent(p, x, lambda, rho, budget, s, book);
      used += inner.iterations;
      x = inner.x;

      const double fx = eval_objective(p, x);
      const double viol = max_violation(p, x);
      const bool feasible = viol <= s.tol_feasibility;

      if (inner.stationary && feasible) {
        out.point = x;
        out.value = fx;
        out.violation = viol;
        out.feasible = true;
        out.converged = true;
        out.iterations = used;
        return out;
      }

      for (size_t a = 0; a < p.constraints.size(); ++a) {
        const Eigen::Index ai = static_cast<Eigen::Index>(a);
        lambda(ai) = std::max(0.0, lambda(ai) + rho * eval_constraint(p, a, x));
      }
      if (viol > s.tol_feasibility && viol > 0.25 * viol_prev) rho = std::min(rho * 10.0, s.rho_max);
      viol_prev = viol;
    }

    out.iterations = used;
    if (book.have_feasible) {
      out.point = book.best_x;
      out.value = book.best_f;
      out.violation = max_violation(p, book.best_x);
      out.feasible = true;
    } else if (book.have_any) {
      out.point = book.any_x;
      out.value = eval_objective(p, book.any_x);
      out.violation = book.any_viol;
    } else {
      out.failed = true;
      out.diagnostic = "no iterate produced";
    }
  } catch (const NonFiniteEval& e) {
    out.failed = true;
    out.diagnostic = e.what;
  }
  return out;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

void DecisionProblem::validate() const {
  if (lower.size() == 0) throw std::invalid_argument("DecisionProblem: empty bounds");
  if (lower.size() != upper.size())
    throw std::invalid_argument("DecisionProblem: bound vectors differ in size");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i)))
      throw std::invalid_argument("DecisionProblem: lower > upper in coordinate " +
                                  std::to_string(i));
  }
  if (!objective) throw std::invalid_argument("DecisionProblem: objective not set");
}

double check_feasibility(const DecisionProblem& problem, const Eigen::VectorXd& x) {
  if (problem.constraints.empty()) return kVacuousFeasibility;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& g : problem.constraints) worst = std::max(worst, g(x));
  return worst;
}

SolveResult minimize(const DecisionProblem& problem, const Eigen::VectorXd& initial,
                     const SolverSettings& settings) {
  problem.validate();
  if (initial.size() != problem.lower.size())
    throw std::invalid_argument("minimize: initial point has dimension " +
                                std::to_string(initial.size()) + ", expected " +
                                std::to_string(problem.lower.size()));
  if (settings.multistarts < 1)
    throw std::invalid_argument("minimize: multistarts must be >= 1");

  const int n = problem.dim();
  const int n_primes = static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0]));

  // Start layout: the caller's (projected) point first, then a Halton set
  // rotated by a seed-derived offset. Deterministic in (problem, settings).
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(project(problem, initial));
  Eigen::VectorXd offset(n);
  for (int d = 0; d < n; ++d) {
    Rng r(derive_seed(settings.seed, "multistart", static_cast<uint64_t>(d)));
    offset(d) = r.uniform();
  }
  for (int k = 1; k < settings.multistarts; ++k) {
    Eigen::VectorXd u(n);
    for (int d = 0; d < n; ++d) {
      double v = radical_inverse(kPrimes[d % n_primes], static_cast<uint64_t>(k)) + offset(d);
      v -= std::floor(v);
      u(d) = v;
    }
    starts.push_back(
        (problem.lower.array() + u.array() * (problem.upper - problem.lower).array()).matrix());
  }

  std::vector<StartOutcome> outcomes;
  outcomes.reserve(starts.size());
  for (const auto& x0 : starts) outcomes.push_back(solve_from(problem, x0, settings));

  // Selection: best feasible by value (lexicographic point breaks exact ties),
  // otherwise the least-violating iterate.
  const StartOutcome* chosen = nullptr;
  for (const auto& o : outcomes) {
    if (o.failed || !o.feasible) continue;
    if (chosen == nullptr || o.value < chosen->value ||
        (o.value == chosen->value && lex_less(o.point, chosen->point)))
      chosen = &o;
  }
  SolveResult result;
  if (chosen != nullptr) {
    result.point = chosen->point;
    result.value = chosen->value;
    result.max_violation = problem.constraints.empty() ? kVacuousFeasibility : chosen->violation;
    result.status = chosen->converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
    result.iterations = chosen->iterations;
    return result;
  }

  for (const auto& o : outcomes) {
    if (o.failed) continue;
    if (chosen == nullptr || o.violation < chosen->violation) chosen = &o;
  }
  if (chosen != nullptr) {
    result.point = chosen->point;
    result.value = chosen->value;
    result.max_violation = chosen->violation;
    result.status = SolveStatus::Infeasible;
    result.iterations = chosen->iterations;
    result.diagnostic = "no feasible point found";
    return result;
  }

  result.point = project(problem, initial);
  result.value = std::numeric_limits<double>::quiet_NaN();
  result.max_violation = std::numeric_limits<double>::infinity();
  result.status = SolveStatus::Infeasible;
  std::string why;
  for (const auto& o : outcomes)
    if (o.failed && why.empty()) why = o.diagnostic;
  result.diagnostic = why.empty() ? "all starts failed" : why;
  return result;
}

SolveResult grid_oracle(const DecisionProblem& problem, double resolution) {
  problem.validate();
  if (!(resolution > 0.0))
    throw std::invalid_argument("grid_oracle: resolution must be > 0, got " +
                                std::to_string(resolution));
  const int n = problem.dim();
  if (n > 3)
    throw std::invalid_argument("grid_oracle: dimension must be <= 3, got " + std::to_string(n));

  std::vector<std::vector<double>> axes(static_cast<size_t>(n));
  double total = 1.0;
  for (int d = 0; d < n; ++d) {
    const double lo = problem.lower(d), hi = problem.upper(d);
    const double snap = 1e-12 * std::max(1.0, std::abs(hi));
    std::vector<double>& axis = axes[static_cast<size_t>(d)];
    for (long k = 0;; ++k) {
      const double v = lo + static_cast<double>(k) * resolution;  // no accumulation drift
      if (v > hi + snap) break;
      axis.push_back(std::min(v, hi));
    }
    if (axis.empty() || axis.back() < hi - snap) axis.push_back(hi);
    total *= static_cast<double>(axis.size());
  }
  if (total > 5e7) throw std::invalid_argument("grid_oracle: grid would exceed 5e7 points");

  SolveResult result;
  result.status = SolveStatus::Infeasible;
  result.max_violation = std::numeric_limits<double>::infinity();
  bool found = false;
  double best = std::numeric_limits<double>::infinity();

  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  Eigen::VectorXd x(n);
  int evaluated = 0;
  while (true) {
    for (int d = 0; d < n; ++d) x(d) = axes[static_cast<size_t>(d)][idx[static_cast<size_t>(d)]];
    ++evaluated;
    const double viol = check_feasibility(problem, x);
    if (problem.constraints.empty() || viol <= 1e-9) {
      const double f = problem.objective(x);
      if (std::isfinite(f) && f < best) {  // strict < keeps the lexicographically first tie
        best = f;
        result.point = x;
        result.value = f;
        result.max_violation = viol;
        found = true;
      }
    }
    // lexicographic advance, last axis fastest
    int d = n - 1;
    while (d >= 0) {
      if (++idx[static_cast<size_t>(d)] < axes[static_cast<size_t>(d)].size()) break;
      idx[static_cast<size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  result.iterations = evaluated;
  if (found) result.status = SolveStatus::Converged;
  else result.diagnostic = "no feasible grid point";
  return result;
}

}  // namespace arteo
