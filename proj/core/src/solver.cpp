#include "ipiano/solver.hpp"

#include <cmath>
#include <sstream>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Rounding allowance on the descent-lemma test; near convergence both sides
// agree to machine precision.
double descent_tolerance(double f_curr) { return 1e-12 * (1.0 + std::abs(f_curr)); }

double initial_lipschitz(const StepRule& rule) {
  return std::visit(Overloaded{
                        [](const ConstantRule& r) { return r.lipschitz; },
                        [](const BacktrackingRule& r) { return r.lipschitz_init; },
                        [](const LazyBacktrackingRule& r) { return r.lipschitz_init; },
                        [](const GeneralRule& r) { return r.lipschitz_init; },
                    },
                    rule);
}

double initial_delta_bound(const StepRule& rule) {
  return std::visit(Overloaded{
                        [](const BacktrackingRule& r) {
                          return r.delta_init.value_or(
                              std::numeric_limits<double>::infinity());
                        },
                        [](const GeneralRule& r) { return r.delta_init; },
                        [](const auto&) { return std::numeric_limits<double>::infinity(); },
                    },
                    rule);
}

double shrink_factor(const StepRule& rule) {
  return std::visit(Overloaded{
                        [](const BacktrackingRule& r) { return r.shrink_factor; },
                        [](const LazyBacktrackingRule& r) { return r.shrink_factor; },
                        [](const auto&) { return 1.0; },
                    },
                    rule);
}

double backtracking_anchor(const BacktrackingRule& rule, const SolverState& state,
                           double lipschitz) {
  if (std::isfinite(state.delta_prev)) return state.delta_prev;
  if (rule.delta_init) return *rule.delta_init;
  return delta_for_beta(rule.beta_target, lipschitz, rule.c2);
}

AlphaBeta trial_params(const StepRule& rule, const SolverState& state,
                       double lipschitz) {
  return std::visit(
      Overloaded{
          [](const ConstantRule& r) {
            return AlphaBeta{r.safety * 2.0 * (1.0 - r.beta) / r.lipschitz, r.beta};
          },
          [&](const BacktrackingRule& r) {
            const BiPianoParams p =
                bipiano_params(lipschitz, backtracking_anchor(r, state, lipschitz), r.c2);
            return AlphaBeta{p.alpha, p.beta};
          },
          [&](const LazyBacktrackingRule& r) {
            return AlphaBeta{r.safety * 2.0 * (1.0 - r.beta) / lipschitz, r.beta};
          },
          [&](const GeneralRule& r) {
            const ScheduleContext ctx{state.iter, lipschitz, state.delta_prev, r.c1, r.c2};
            const double beta = r.beta_schedule(ctx);
            return AlphaBeta{r.alpha_schedule(ctx, beta), beta};
          },
      },
      rule);
}

double proximal_residual_norm(const Objective& obj, const SolverState& state) {
  Vector forward(state.x_curr.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    forward[i] = state.x_curr[i] - state.grad_curr[i];
  }
  return distance(state.x_curr, obj.prox(forward, 1.0));
}

}  // namespace

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxIterations:
      return "max_iterations";
    case StopReason::kEnergyTolerance:
      return "energy_tolerance";
    case StopReason::kResidualTolerance:
      return "residual_tolerance";
    case StopReason::kTargetEnergy:
      return "target_energy";
  }
  return "unknown";
}

double descent_lemma_slack(double f_curr, double f_next,
                           std::span<const double> grad_curr,
                           std::span<const double> x_curr,
                           std::span<const double> x_next, double lipschitz) {
  double linear = 0.0;
  double squared = 0.0;
  for (std::size_t i = 0; i < x_curr.size(); ++i) {
    const double d = x_next[i] - x_curr[i];
    linear += grad_curr[i] * d;
    squared += d * d;
  }
  return f_curr + linear + 0.5 * lipschitz * squared - f_next;
}

SolverState initial_state(const Objective& obj, std::span<const double> x0) {
  SolverState state;
  state.x_curr.assign(x0.begin(), x0.end());
  state.x_prev = state.x_curr;
  ValueGrad vg = obj.smooth_eval(state.x_curr);
  state.f_curr = vg.value;
  state.grad_curr = std::move(vg.grad);
  state.g_curr = obj.convex_value(state.x_curr);
  if (!std::isfinite(state.f_curr) || !std::isfinite(state.g_curr) ||
      !all_finite(state.grad_curr)) {
    throw ConfigError("initial point is outside the domain of h");
  }
  return state;
}

SolverState ipiano_step(const SolverState& state, const Objective& obj,
                        double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw ConfigError("ipiano_step: need alpha > 0 and beta >= 0");
  }
  const std::size_t n = state.x_curr.size();
  Vector forward(n);
  for (std::size_t i = 0; i < n; ++i) {
    forward[i] = state.x_curr[i] - alpha * state.grad_curr[i] +
                 beta * (state.x_curr[i] - state.x_prev[i]);
  }
  Vector x_next = obj.prox(forward, alpha);
  if (!all_finite(x_next)) {
    throw DivergenceError("ipiano_step: non-finite prox output (alpha=" +
                          std::to_string(alpha) + ")");
  }

  SolverState next;
  ValueGrad vg = obj.smooth_eval(x_next);
  if (!std::isfinite(vg.value) || !all_finite(vg.grad)) {
    throw DivergenceError("ipiano_step: non-finite gradient (alpha=" +
                          std::to_string(alpha) + ")");
  }
  next.f_curr = vg.value;
  next.grad_curr = std::move(vg.grad);
  next.g_curr = obj.convex_value(x_next);
  next.step_norm = distance(x_next, state.x_curr);
  next.x_prev = state.x_curr;
  next.x_curr = std::move(x_next);
  next.iter = state.iter + 1;
  next.alpha = alpha;
  next.beta = beta;
  next.delta_prev = state.delta_prev;
  return next;
}

BacktrackResult backtrack_step(const Objective& obj, const SolverState& state,
                               const StepRule& rule, double lipschitz_start,
                               const SolveOptions& options) {
  const bool searches = !std::holds_alternative<ConstantRule>(rule);
  const double eta = std::visit(Overloaded{
                                    [](const ConstantRule&) { return 1.0; },
                                    [](const auto& r) { return r.eta; },
                                },
                                rule);

  BacktrackResult result;
  double lipschitz = searches ? lipschitz_start : std::get<ConstantRule>(rule).lipschitz;
  for (;;) {
    if (lipschitz > options.lipschitz_cap) {
      std::ostringstream msg;
      msg << "backtracking exceeded the Lipschitz cap " << options.lipschitz_cap
          << " at iteration " << state.iter;
      throw NonSmoothError(msg.str());
    }
    const AlphaBeta p = trial_params(rule, state, lipschitz);
    if (!searches) {
      result.next = ipiano_step(state, obj, p.alpha, p.beta);
      break;
    }
    bool accepted = false;
    try {
      SolverState trial = ipiano_step(state, obj, p.alpha, p.beta);
      const double slack = descent_lemma_slack(state.f_curr, trial.f_curr, state.grad_curr,
                                               state.x_curr, trial.x_curr, lipschitz);
      if (slack >= -descent_tolerance(state.f_curr)) {
        result.next = std::move(trial);
        accepted = true;
      }
    } catch (const NumericalError&) {
      // A trial step that left the region where f is well defined counts as
      // a failed descent test.
    }
    if (accepted) break;
    lipschitz *= eta;
    ++result.backtracks;
  }

  SolverState& next = result.next;
  const DeltaGamma dg = delta_gamma(next.alpha, next.beta, lipschitz);
  next.lipschitz = lipschitz;
  next.delta = dg.delta;
  next.gamma = dg.gamma;
  next.delta_prev = dg.delta;

  if (const auto* bt = std::get_if<BacktrackingRule>(&rule)) {
    next.delta_prev = backtracking_anchor(*bt, state, lipschitz);
  } else if (const auto* general = std::get_if<GeneralRule>(&rule)) {
    const ParamCheck check = general_param_check(next.alpha, next.beta, lipschitz,
                                                 general->c1, general->c2,
                                                 state.delta_prev);
    if (!check.ok) {
      throw ConfigError("general rule: infeasible step parameters at iteration " +
                        std::to_string(state.iter) + ": " + check.reason);
    }
  }

  result.lipschitz = lipschitz;
  result.next_lipschitz_guess = lipschitz / shrink_factor(rule);
  return result;
}

SolveResult solve(const Objective& obj, const StepRule& rule,
                  std::span<const double> x0, const StopCriterion& stop,
                  const SolveOptions& options) {
  if (options.validate_rule) validate(rule);
  if (stop.max_iters == 0 && stop.tol_energy <= 0.0 && stop.tol_residual <= 0.0 &&
      !stop.target) {
    throw ConfigError("stop criterion: at least one bound must be active");
  }

  SolveResult result;
  Trace& trace = result.trace;
  SolverState state = initial_state(obj, x0);
  state.delta_prev = initial_delta_bound(rule);
  double lipschitz_guess = initial_lipschitz(rule);
  if (options.keep_iterates) trace.iterates.push_back(state.x_curr);

  double h_prev = 0.0;
  for (;;) {
    const std::size_t n = state.iter;
    const double h = state.f_curr + state.g_curr;
    const double residual = proximal_residual_norm(obj, state);

    std::optional<StopReason> reason;
    if (stop.target && h - stop.target->h_star <= stop.target->tol) {
      reason = StopReason::kTargetEnergy;
    } else if (residual <= stop.tol_residual) {
      reason = StopReason::kResidualTolerance;
    } else if (n > 0 && stop.tol_energy > 0.0 && std::abs(h_prev - h) < stop.tol_energy) {
      reason = StopReason::kEnergyTolerance;
    } else if (n >= stop.max_iters) {
      reason = StopReason::kMaxIterations;
    }
    if (reason) {
      trace.last = {n, state.f_curr, state.g_curr, h, state.step_norm, residual};
      result.reason = *reason;
      break;
    }

    BacktrackResult step = backtrack_step(obj, state, rule, lipschitz_guess, options);
    const SolverState& next = step.next;

    TraceRecord rec;
    rec.n = n;
    rec.f = state.f_curr;
    rec.g = state.g_curr;
    rec.h = h;
    rec.alpha = next.alpha;
    rec.beta = next.beta;
    rec.lipschitz = next.lipschitz;
    rec.delta = next.delta;
    rec.gamma = next.gamma;
    rec.step_norm = state.step_norm;
    rec.lyapunov = h + next.delta * state.step_norm * state.step_norm;
    rec.residual_norm = residual;
    rec.backtracks = step.backtracks;
    trace.records.push_back(rec);

    lipschitz_guess = step.next_lipschitz_guess;
    h_prev = h;
    state = std::move(step.next);
    if (options.keep_iterates) trace.iterates.push_back(state.x_curr);
  }

  result.x = std::move(state.x_curr);
  return result;
}

}  // namespace ipiano
