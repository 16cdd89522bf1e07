#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>

namespace ipiano {

inline constexpr double kDefaultC1 = 1e-8;
inline constexpr double kDefaultC2 = 1e-6;
// alpha = 0.995 * 2(1 - beta)/L = 1.99(1 - beta)/L.
inline constexpr double kDefaultSafety = 0.995;
inline constexpr double kDefaultEta = 1.2;
inline constexpr double kDefaultShrink = 1.05;
inline constexpr double kDefaultLipschitzCap = 1e12;

// delta_n and gamma_n of the general step-size law:
//   delta = 1/alpha - L/2 - beta/(2 alpha),  gamma = 1/alpha - L/2 - beta/alpha.
struct DeltaGamma {
  double delta = 0.0;
  double gamma = 0.0;
};
DeltaGamma delta_gamma(double alpha, double beta, double lipschitz);

// Absolute rounding slack used when comparing delta/gamma against their
// bounds. Both are differences of terms of size ~1/alpha and ~L.
double law_tolerance(double alpha, double lipschitz);

// ciPiano: fixed beta and L, alpha = safety * 2(1 - beta)/L.
struct ConstantRule {
  double beta = 0.0;
  double lipschitz = 1.0;
  double safety = kDefaultSafety;
};

// biPiano: backtracking on L_n with beta_n, alpha_n derived from a fixed
// delta >= c2. When delta_init is empty, delta is derived from beta_target at
// the first accepted L so that beta_0 == beta_target.
struct BacktrackingRule {
  double c2 = kDefaultC2;
  std::optional<double> delta_init;
  double beta_target = 0.0;
  double eta = kDefaultEta;
  double lipschitz_init = 1.0;
  // L_n / shrink_factor seeds the next search; 1 disables the relaxation.
  double shrink_factor = 1.0;
};

// nmiPiano: fixed beta, backtracking on L_n, alpha_n = safety * 2(1-beta)/L_n.
struct LazyBacktrackingRule {
  double beta = 0.0;
  double lipschitz_init = 1.0;
  double eta = kDefaultEta;
  double shrink_factor = kDefaultShrink;
  double safety = kDefaultSafety;
};

struct ScheduleContext {
  std::size_t n = 0;
  double lipschitz = 1.0;
  double delta_prev = std::numeric_limits<double>::infinity();
  double c1 = kDefaultC1;
  double c2 = kDefaultC2;
};

// Fully general iPiano: L_n by backtracking, (alpha_n, beta_n) from the user
// schedules, checked against the general law at every accepted step.
struct GeneralRule {
  double c1 = kDefaultC1;
  double c2 = kDefaultC2;
  std::function<double(const ScheduleContext&)> beta_schedule;
  std::function<double(const ScheduleContext&, double beta)> alpha_schedule;
  double eta = kDefaultEta;
  double lipschitz_init = 1.0;
  double delta_init = std::numeric_limits<double>::infinity();
};

using StepRule =
    std::variant<ConstantRule, BacktrackingRule, LazyBacktrackingRule, GeneralRule>;

// Throws ConfigError when the rule's constants violate their invariants.
void validate(const StepRule& rule);
std::string rule_name(const StepRule& rule);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};
AlphaBeta constant_params(double lipschitz, double beta, double safety);

struct BiPianoParams {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};
// b = (delta + L/2)/(c2 + L/2), beta = (b-1)/(b-1/2), alpha = 2(1-beta)/(2c2+L).
// delta and gamma are recomputed from the general law.
BiPianoParams bipiano_params(double lipschitz, double delta_prev, double c2);

// The delta for which bipiano_params(L, delta, c2).beta == beta.
double delta_for_beta(double beta, double lipschitz, double c2);

// Largest beta for which the interval of feasible alphas is non-empty.
double max_feasible_beta(double lipschitz, double delta_prev, double c2);

struct ParamCheck {
  bool ok = false;
  double delta = 0.0;
  double gamma = 0.0;
  std::string reason;
};
// ok iff alpha >= c1, beta in [0,1), delta >= gamma >= c2, delta <= delta_prev
// (up to law_tolerance). Violations are a return value, never thrown.
ParamCheck general_param_check(double alpha, double beta, double lipschitz,
                               double c1, double c2, double delta_prev);

// General rule whose beta_n is min(beta, (1-1e-6) * max feasible beta) and
// whose alpha_n is the midpoint of the feasible interval
//   (1 - beta/2)/(delta_prev + L/2) <= alpha <= (1 - beta)/(c2 + L/2).
GeneralRule midpoint_general_rule(double beta, double c1 = kDefaultC1,
                                  double c2 = kDefaultC2,
                                  double lipschitz_init = 1.0,
                                  double eta = kDefaultEta);

}  // namespace ipiano
