#include <cmath>
#include <limits>

#include "doctest.h"
#include "ipiano/errors.hpp"
#include "ipiano/problems/toy.hpp"
#include "ipiano/solver.hpp"

using ipiano::Vector;

namespace {

// f(x) = c/2 |x|^2.
ipiano::Objective quadratic(double c, ipiano::ConvexTerm g = ipiano::zero_term()) {
  return ipiano::make_objective(
      [c](std::span<const double> x) { return 0.5 * c * ipiano::squared_norm(x); },
      [c](std::span<const double> x) {
        Vector grad(x.begin(), x.end());
        for (double& v : grad) v *= c;
        return grad;
      },
      std::move(g));
}

ipiano::SolverState advanced_state(const ipiano::Objective& obj) {
  ipiano::SolverState s = ipiano::initial_state(obj, Vector{1.0, -2.0, 0.5});
  return ipiano::ipiano_step(s, obj, 0.01, 0.3);
}

}  // namespace

TEST_CASE("initial state duplicates x0") {
  const auto obj = quadratic(2.0);
  const auto s = ipiano::initial_state(obj, Vector{1.0, 2.0});
  CHECK(s.x_prev == s.x_curr);
  CHECK(s.step_norm == 0.0);
  CHECK(s.f_curr == 5.0);
  CHECK(s.grad_curr == Vector{2.0, 4.0});

  const auto bad = ipiano::make_objective(
      [](std::span<const double>) { return std::numeric_limits<double>::infinity(); },
      [](std::span<const double> x) { return Vector(x.size(), 0.0); }, ipiano::zero_term());
  CHECK_THROWS_AS(ipiano::initial_state(bad, Vector{0.0}), ipiano::ConfigError);
}

TEST_CASE("beta = 0 is exactly forward-backward") {
  const auto obj = quadratic(3.0, ipiano::l1_term(0.7));
  const auto s = advanced_state(obj);
  const double alpha = 0.05;
  const auto next = ipiano::ipiano_step(s, obj, alpha, 0.0);
  Vector forward(s.x_curr.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    forward[i] = s.x_curr[i] - alpha * s.grad_curr[i];
  }
  CHECK(next.x_curr == ipiano::prox_l1(forward, alpha * 0.7));
  CHECK(next.x_prev == s.x_curr);
}

TEST_CASE("g = 0 is exactly the Heavy-ball update") {
  const auto obj = quadratic(3.0);
  const auto s = advanced_state(obj);
  const double alpha = 0.05;
  const double beta = 0.6;
  const auto next = ipiano::ipiano_step(s, obj, alpha, beta);
  for (std::size_t i = 0; i < s.x_curr.size(); ++i) {
    const double expected =
        s.x_curr[i] - alpha * s.grad_curr[i] + beta * (s.x_curr[i] - s.x_prev[i]);
    CHECK(next.x_curr[i] == expected);
  }
  CHECK(next.step_norm == ipiano::distance(next.x_curr, s.x_curr));
}

TEST_CASE("non-finite prox output is a divergence") {
  ipiano::ConvexTerm broken = ipiano::zero_term();
  broken.prox = [](std::span<const double> y, double) {
    return Vector(y.size(), std::numeric_limits<double>::quiet_NaN());
  };
  const auto obj = quadratic(1.0, broken);
  const auto s = ipiano::initial_state(obj, Vector{1.0});
  CHECK_THROWS_AS(ipiano::ipiano_step(s, obj, 0.1, 0.0), ipiano::DivergenceError);
  CHECK_THROWS_AS(ipiano::ipiano_step(s, obj, 0.0, 0.0), ipiano::ConfigError);
}

TEST_CASE("backtracking finds the minimal power of eta") {
  const auto obj = quadratic(100.0);
  const auto state = ipiano::initial_state(obj, Vector{1.0, -0.5});
  ipiano::LazyBacktrackingRule rule;
  rule.beta = 0.3;
  rule.eta = 2.0;
  rule.lipschitz_init = 1.0;
  rule.shrink_factor = 1.0;
  const auto result = ipiano::backtrack_step(obj, state, rule, 1.0);

  CHECK(result.backtracks > 0);
  CHECK(result.lipschitz == std::ldexp(1.0, result.backtracks));
  const double tol = 1e-12 * (1.0 + std::abs(state.f_curr));
  CHECK(ipiano::descent_lemma_slack(state.f_curr, result.next.f_curr, state.grad_curr,
                                    state.x_curr, result.next.x_curr,
                                    result.lipschitz) >= -tol);

  const double smaller = result.lipschitz / rule.eta;
  const double alpha = rule.safety * 2.0 * (1.0 - rule.beta) / smaller;
  const auto trial = ipiano::ipiano_step(state, obj, alpha, rule.beta);
  CHECK(ipiano::descent_lemma_slack(state.f_curr, trial.f_curr, state.grad_curr,
                                    state.x_curr, trial.x_curr, smaller) < -tol);
}

TEST_CASE("backtracking at the true constant does not search") {
  const auto obj = quadratic(4.0, ipiano::l1_term(0.1));
  const auto state = ipiano::initial_state(obj, Vector{1.0, 2.0, -3.0});
  ipiano::BacktrackingRule bt;
  bt.beta_target = 0.5;
  const auto a = ipiano::backtrack_step(obj, state, bt, 4.0);
  CHECK(a.backtracks == 0);
  CHECK(a.lipschitz == 4.0);
  ipiano::LazyBacktrackingRule lazy;
  const auto b = ipiano::backtrack_step(obj, state, lazy, 8.0);
  CHECK(b.backtracks == 0);
  CHECK(b.next_lipschitz_guess == doctest::Approx(8.0 / 1.05));
}

TEST_CASE("Lipschitz cap raises NonSmoothError") {
  const auto obj = quadratic(1000.0);
  ipiano::LazyBacktrackingRule rule;
  ipiano::SolveOptions options;
  options.lipschitz_cap = 10.0;
  ipiano::StopCriterion stop;
  stop.max_iters = 5;
  CHECK_THROWS_AS(ipiano::solve(obj, rule, Vector{1.0}, stop, options), ipiano::NonSmoothError);
}

TEST_CASE("toy run with inertia converges to a stationary point") {
  const ipiano::ToyProblem prob;
  const auto obj = ipiano::toy_objective(prob);
  ipiano::StopCriterion stop;
  stop.max_iters = 10000;
  stop.tol_residual = 1e-8;
  const auto result =
      ipiano::solve(obj, ipiano::ConstantRule{0.75, prob.lipschitz()}, prob.u0, stop);
  CHECK(result.reason == ipiano::StopReason::kResidualTolerance);
  CHECK(result.trace.last.residual_norm <= 1e-8);
  double nearest = std::numeric_limits<double>::infinity();
  for (const Vector& p : ipiano::toy_stationary_points(prob)) {
    nearest = std::min(nearest, ipiano::distance(p, result.x));
  }
  CHECK(nearest <= 1e-6);
}

TEST_CASE("lazy rule from L = 1 grows L monotonically without relaxation") {
  const ipiano::ToyProblem prob;
  const auto obj = ipiano::toy_objective(prob);
  ipiano::LazyBacktrackingRule rule;
  rule.beta = 0.5;
  rule.shrink_factor = 1.0;
  ipiano::StopCriterion stop;
  stop.max_iters = 300;
  stop.tol_residual = -1.0;
  const auto result = ipiano::solve(obj, rule, Vector{1.3, 0.8}, stop);
  const auto& recs = result.trace.records;
  REQUIRE(recs.size() == 300);
  CHECK(recs.back().lipschitz > 1.0);
  for (std::size_t n = 1; n < recs.size(); ++n) {
    CHECK(recs[n].lipschitz >= recs[n - 1].lipschitz);
  }
}

TEST_CASE("every rule obeys the step-size law along the trace") {
  const ipiano::ToyProblem prob;
  const auto obj = ipiano::toy_objective(prob);
  ipiano::StopCriterion stop;
  stop.max_iters = 400;
  ipiano::BacktrackingRule bt;
  bt.beta_target = 0.6;
  const std::vector<ipiano::StepRule> rules = {
      ipiano::ConstantRule{0.6, prob.lipschitz()}, bt, ipiano::LazyBacktrackingRule{0.6},
      ipiano::midpoint_general_rule(0.6)};
  for (const auto& rule : rules) {
    CAPTURE(ipiano::rule_name(rule));
    const auto result = ipiano::solve(obj, rule, Vector{2.5, -1.5}, stop);
    const bool monotone = std::holds_alternative<ipiano::BacktrackingRule>(rule) ||
                          std::holds_alternative<ipiano::GeneralRule>(rule) ||
                          std::holds_alternative<ipiano::ConstantRule>(rule);
    const auto& recs = result.trace.records;
    for (std::size_t n = 0; n < recs.size(); ++n) {
      const auto& r = recs[n];
      const double tol = ipiano::law_tolerance(r.alpha, r.lipschitz);
      CHECK(r.alpha >= ipiano::kDefaultC1);
      CHECK(r.beta >= 0.0);
      CHECK(r.beta < 1.0);
      CHECK(r.delta >= r.gamma - tol);
      CHECK(r.gamma >= ipiano::kDefaultC2 - tol);
      if (monotone && n > 0) CHECK(r.delta <= recs[n - 1].delta + tol);
      CHECK(r.lyapunov == r.h + r.delta * r.step_norm * r.step_norm);
    }
  }
}

TEST_CASE("solves are deterministic") {
  const ipiano::ToyProblem prob;
  const auto obj = ipiano::toy_objective(prob);
  ipiano::StopCriterion stop;
  stop.max_iters = 200;
  const ipiano::LazyBacktrackingRule rule{0.4};
  const auto a = ipiano::solve(obj, rule, Vector{0.3, -1.7}, stop);
  const auto b = ipiano::solve(obj, rule, Vector{0.3, -1.7}, stop);
  CHECK(a.x == b.x);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t n = 0; n < a.trace.size(); ++n) {
    CHECK(a.trace.records[n].h == b.trace.records[n].h);
    CHECK(a.trace.records[n].lipschitz == b.trace.records[n].lipschitz);
  }
}

TEST_CASE("stop criteria") {
  const auto obj = quadratic(1.0, ipiano::l1_term(0.1));
  const ipiano::ConstantRule rule{0.0, 1.0};
  ipiano::StopCriterion none;
  none.max_iters = 0;
  CHECK_THROWS_AS(ipiano::solve(obj, rule, Vector{1.0}, none), ipiano::ConfigError);

  ipiano::StopCriterion capped;
  capped.max_iters = 7;
  const auto a = ipiano::solve(obj, rule, Vector{5.0}, capped);
  CHECK(a.reason == ipiano::StopReason::kMaxIterations);
  CHECK(a.trace.size() == 7);
  CHECK(a.trace.last.n == 7);

  ipiano::StopCriterion target;
  target.max_iters = 1000;
  target.target = ipiano::TargetEnergy{0.0, 1.0};
  const auto b = ipiano::solve(obj, rule, Vector{5.0}, target);
  CHECK(b.reason == ipiano::StopReason::kTargetEnergy);
  CHECK(b.trace.last.h <= 1.0);

  ipiano::StopCriterion energy;
  energy.max_iters = 1000;
  energy.tol_energy = 1e-3;
  const auto c = ipiano::solve(obj, ipiano::ConstantRule{0.5, 1.0}, Vector{5.0, 3.0}, energy);
  CHECK(c.reason != ipiano::StopReason::kMaxIterations);

  ipiano::SolveOptions keep;
  keep.keep_iterates = true;
  const auto d = ipiano::solve(obj, rule, Vector{5.0}, capped, keep);
  CHECK(d.trace.iterates.size() == d.trace.size() + 1);
  CHECK(d.trace.iterates.back() == d.x);
}
