#include "ipiano/step_rule.hpp"

#include <algorithm>
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

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool valid_beta(double beta) { return beta >= 0.0 && beta < 1.0; }

}  // namespace

DeltaGamma delta_gamma(double alpha, double beta, double lipschitz) {
  const double inv_alpha = 1.0 / alpha;
  return {inv_alpha - 0.5 * lipschitz - 0.5 * beta * inv_alpha,
          inv_alpha - 0.5 * lipschitz - beta * inv_alpha};
}

double law_tolerance(double alpha, double lipschitz) {
  return 1e-9 * (1.0 / alpha + lipschitz);
}

void validate(const StepRule& rule) {
  std::visit(
      Overloaded{
          [](const ConstantRule& r) {
            require(valid_beta(r.beta), "constant rule: beta must be in [0,1)");
            require(r.lipschitz > 0.0, "constant rule: L must be > 0");
            require(r.safety > 0.0 && r.safety < 1.0,
                    "constant rule: safety must be in (0,1)");
          },
          [](const BacktrackingRule& r) {
            require(r.c2 > 0.0, "backtracking rule: c2 must be > 0");
            if (r.delta_init) {
              require(*r.delta_init >= r.c2,
                      "backtracking rule: delta must be >= c2");
            } else {
              require(valid_beta(r.beta_target),
                      "backtracking rule: beta must be in [0,1)");
            }
            require(r.eta > 1.0, "backtracking rule: eta must be > 1");
            require(r.lipschitz_init > 0.0, "backtracking rule: L_init must be > 0");
            require(r.shrink_factor >= 1.0,
                    "backtracking rule: shrink factor must be >= 1");
          },
          [](const LazyBacktrackingRule& r) {
            require(valid_beta(r.beta), "lazy rule: beta must be in [0,1)");
            require(r.lipschitz_init > 0.0, "lazy rule: L_init must be > 0");
            require(r.eta > 1.0, "lazy rule: eta must be > 1");
            require(r.shrink_factor >= 1.0, "lazy rule: shrink factor must be >= 1");
            require(r.safety > 0.0 && r.safety < 1.0,
                    "lazy rule: safety must be in (0,1)");
          },
          [](const GeneralRule& r) {
            require(r.c1 > 0.0 && r.c2 > 0.0, "general rule: c1, c2 must be > 0");
            require(static_cast<bool>(r.beta_schedule) &&
                        static_cast<bool>(r.alpha_schedule),
                    "general rule: alpha and beta schedules must be set");
            require(r.eta > 1.0, "general rule: eta must be > 1");
            require(r.lipschitz_init > 0.0, "general rule: L_init must be > 0");
            require(r.delta_init >= r.c2, "general rule: delta_init must be >= c2");
          },
      },
      rule);
}

std::string rule_name(const StepRule& rule) {
  return std::visit(Overloaded{
                        [](const ConstantRule&) { return std::string("constant"); },
                        [](const BacktrackingRule&) { return std::string("backtracking"); },
                        [](const LazyBacktrackingRule&) { return std::string("lazy"); },
                        [](const GeneralRule&) { return std::string("general"); },
                    },
                    rule);
}

AlphaBeta constant_params(double lipschitz, double beta, double safety) {
  require(lipschitz > 0.0, "constant_params: L must be > 0");
  require(valid_beta(beta), "constant_params: beta must be in [0,1)");
  require(safety > 0.0 && safety < 1.0, "constant_params: safety must be in (0,1)");
  return {safety * 2.0 * (1.0 - beta) / lipschitz, beta};
}

BiPianoParams bipiano_params(double lipschitz, double delta_prev, double c2) {
  require(c2 > 0.0, "bipiano_params: c2 must be > 0");
  require(delta_prev >= c2, "bipiano_params: delta_prev must be >= c2");
  require(lipschitz > 0.0, "bipiano_params: L must be > 0");
  const double half_l = 0.5 * lipschitz;
  const double b = (delta_prev + half_l) / (c2 + half_l);
  const double beta = (b - 1.0) / (b - 0.5);
  const double alpha = 2.0 * (1.0 - beta) / (2.0 * c2 + lipschitz);
  const DeltaGamma dg = delta_gamma(alpha, beta, lipschitz);
  return {alpha, beta, dg.delta, dg.gamma};
}

double delta_for_beta(double beta, double lipschitz, double c2) {
  require(valid_beta(beta), "delta_for_beta: beta must be in [0,1)");
  const double b = (1.0 - 0.5 * beta) / (1.0 - beta);
  return std::max(c2, b * (c2 + 0.5 * lipschitz) - 0.5 * lipschitz);
}

double max_feasible_beta(double lipschitz, double delta_prev, double c2) {
  if (std::isinf(delta_prev)) return 1.0;
  const double half_l = 0.5 * lipschitz;
  const double b = (delta_prev + half_l) / (c2 + half_l);
  return std::max(0.0, (b - 1.0) / (b - 0.5));
}

ParamCheck general_param_check(double alpha, double beta, double lipschitz,
                               double c1, double c2, double delta_prev) {
  ParamCheck check;
  const DeltaGamma dg = delta_gamma(alpha, beta, lipschitz);
  check.delta = dg.delta;
  check.gamma = dg.gamma;
  const double tol = law_tolerance(alpha, lipschitz);
  std::ostringstream why;
  if (!(alpha >= c1)) {
    why << "alpha=" << alpha << " < c1=" << c1;
  } else if (!valid_beta(beta)) {
    why << "beta=" << beta << " outside [0,1)";
  } else if (!(dg.delta >= dg.gamma - tol)) {
    why << "delta=" << dg.delta << " < gamma=" << dg.gamma;
  } else if (!(dg.gamma >= c2 - tol)) {
    why << "gamma=" << dg.gamma << " < c2=" << c2;
  } else if (!(dg.delta <= delta_prev + tol)) {
    why << "delta=" << dg.delta << " > delta_prev=" << delta_prev;
  }
  check.reason = why.str();
  check.ok = check.reason.empty();
  return check;
}

GeneralRule midpoint_general_rule(double beta, double c1, double c2,
                                  double lipschitz_init, double eta) {
  require(valid_beta(beta), "midpoint_general_rule: beta must be in [0,1)");
  GeneralRule rule;
  rule.c1 = c1;
  rule.c2 = c2;
  rule.eta = eta;
  rule.lipschitz_init = lipschitz_init;
  rule.beta_schedule = [beta](const ScheduleContext& ctx) {
    const double cap =
        (1.0 - 1e-6) * max_feasible_beta(ctx.lipschitz, ctx.delta_prev, ctx.c2);
    return std::min(beta, cap);
  };
  rule.alpha_schedule = [](const ScheduleContext& ctx, double b) {
    const double half_l = 0.5 * ctx.lipschitz;
    const double upper = (1.0 - b) / (ctx.c2 + half_l);
    const double lower = std::isinf(ctx.delta_prev)
                             ? 0.0
                             : (1.0 - 0.5 * b) / (ctx.delta_prev + half_l);
    return std::max(ctx.c1, 0.5 * (lower + upper));
  };
  return rule;
}

}  // namespace ipiano
