#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "ipiano/objective.hpp"
#include "ipiano/step_rule.hpp"
#include "ipiano/trace.hpp"

namespace ipiano {

struct SolverState {
  Vector x_curr;
  Vector x_prev;
  Vector grad_curr;  // grad f(x_curr)
  std::size_t iter = 0;
  // Parameters of the step that produced x_curr.
  double alpha = 0.0;
  double beta = 0.0;
  double lipschitz = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double delta_prev = std::numeric_limits<double>::infinity();
  double f_curr = 0.0;
  double g_curr = 0.0;
  double step_norm = 0.0;
};

// x^{-1} = x^0, Delta_0 = 0, f/g/grad evaluated at x0.
SolverState initial_state(const Objective& obj, std::span<const double> x0);

// One inertial forward-backward step
//   x^{n+1} = prox(x^n - alpha grad f(x^n) + beta (x^n - x^{n-1}), alpha).
// Refreshes f, g, grad at the new point. Throws DivergenceError on non-finite
// values. delta/gamma/lipschitz are left for the caller to fill in.
SolverState ipiano_step(const SolverState& state, const Objective& obj,
                        double alpha, double beta);

struct TargetEnergy {
  double h_star = 0.0;
  double tol = 0.0;
};

struct StopCriterion {
  std::size_t max_iters = 1000;
  double tol_energy = 0.0;    // |h(x^n) - h(x^{n+1})| < tol_energy
  double tol_residual = 0.0;  // |r(x^n)| <= tol_residual
  std::optional<TargetEnergy> target;
};

enum class StopReason { kMaxIterations, kEnergyTolerance, kResidualTolerance, kTargetEnergy };
std::string to_string(StopReason reason);

struct SolveOptions {
  bool keep_iterates = false;
  // Reject rule constants outside their invariants. Only negative controls
  // switch this off.
  bool validate_rule = true;
  double lipschitz_cap = kDefaultLipschitzCap;
};

struct BacktrackResult {
  double lipschitz = 0.0;  // accepted L_n
  double next_lipschitz_guess = 0.0;  // L_n / shrink_factor
  int backtracks = 0;
  SolverState next;
};

// Searches L in {L_start, eta L_start, eta^2 L_start, ...} for the first value
// satisfying the descent-lemma condition at the trial iterate, recomputing the
// full step for every trial. Throws NonSmoothError past lipschitz_cap.
// The ConstantRule performs a single step with its fixed L.
BacktrackResult backtrack_step(const Objective& obj, const SolverState& state,
                               const StepRule& rule, double lipschitz_start,
                               const SolveOptions& options = {});

struct SolveResult {
  Vector x;
  Trace trace;
  StopReason reason = StopReason::kMaxIterations;
};

SolveResult solve(const Objective& obj, const StepRule& rule,
                  std::span<const double> x0, const StopCriterion& stop,
                  const SolveOptions& options = {});

// Slack of the descent-lemma condition
//   f(x+) <= f(x) + <grad f(x), x+ - x> + L/2 |x+ - x|^2
// (rhs - lhs); negative when violated.
double descent_lemma_slack(double f_curr, double f_next,
                           std::span<const double> grad_curr,
                           std::span<const double> x_curr,
                           std::span<const double> x_next, double lipschitz);

}  // namespace ipiano
