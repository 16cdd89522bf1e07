#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "ipiano/errors.hpp"
#include "ipiano/step_rule.hpp"

using doctest::Approx;

TEST_CASE("constant step size") {
  CHECK(ipiano::constant_params(100.0, 0.75, 0.995).alpha == Approx(0.004975).epsilon(1e-14));
  CHECK(ipiano::constant_params(1.0, 0.0, 0.5).alpha == 1.0);
  CHECK(ipiano::constant_params(1.0, 0.999999, 0.995).alpha < 1e-5);
  CHECK_THROWS_AS(ipiano::constant_params(0.0, 0.5, 0.9), ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::constant_params(1.0, 1.0, 0.9), ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::constant_params(1.0, 0.5, 1.0), ipiano::ConfigError);
}

TEST_CASE("delta and gamma of the general law") {
  const auto dg = ipiano::delta_gamma(0.5, 0.0, 2.0);
  CHECK(dg.delta == 1.0);
  CHECK(dg.gamma == 1.0);
  const auto with_beta = ipiano::delta_gamma(0.25, 0.5, 2.0);
  CHECK(with_beta.delta == Approx(4.0 - 1.0 - 1.0));
  CHECK(with_beta.gamma == Approx(4.0 - 1.0 - 2.0));
}

TEST_CASE("general_param_check accepts and rejects") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto ok = ipiano::general_param_check(0.5, 0.0, 2.0, 1e-8, 0.01, inf);
  CHECK(ok.ok);
  CHECK(ok.delta == 1.0);
  CHECK(ok.gamma == 1.0);

  for (double beta : {0.1, 0.5, 0.9}) {
    const double alpha = 2.0 * (1.0 - beta) / 10.0;
    const auto boundary = ipiano::general_param_check(alpha, beta, 10.0, 1e-8, 1e-6, inf);
    CHECK_FALSE(boundary.ok);
    CHECK(std::abs(boundary.gamma) <= 1e-12);
    CHECK(boundary.reason.find("gamma") != std::string::npos);
  }
  CHECK_FALSE(ipiano::general_param_check(1e-9, 0.0, 1.0, 1e-8, 1e-6, inf).ok);
  CHECK_FALSE(ipiano::general_param_check(0.1, 1.0, 1.0, 1e-8, 1e-6, inf).ok);
  CHECK_FALSE(ipiano::general_param_check(0.5, 0.0, 2.0, 1e-8, 0.01, 0.5).ok);
}

TEST_CASE("bipiano parameters") {
  const auto p = ipiano::bipiano_params(2.0, 1.0, 0.01);
  const double b = 2.0 / 1.01;
  const double beta = (b - 1.0) / (b - 0.5);
  CHECK(p.beta == Approx(beta).epsilon(1e-14));
  CHECK(p.beta == Approx(0.6622073578595318).epsilon(1e-12));
  CHECK(p.alpha == Approx(0.33444816053511706).epsilon(1e-12));
  CHECK(p.delta == Approx(1.0).epsilon(1e-12));
  CHECK(p.gamma >= 0.01 * (1 - 1e-12));

  const auto fb = ipiano::bipiano_params(3.0, 0.25, 0.25);
  CHECK(fb.beta == 0.0);
  CHECK(fb.alpha == Approx(2.0 / 3.5));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> log_dist(-6.0, 6.0);
  int failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double c2 = std::pow(10.0, log_dist(rng) / 2.0);
    const double delta = c2 * (1.0 + std::pow(10.0, log_dist(rng)));
    const double lipschitz = std::pow(10.0, log_dist(rng));
    const auto q = ipiano::bipiano_params(lipschitz, delta, c2);
    const double tol = ipiano::law_tolerance(q.alpha, lipschitz);
    failures += !(q.delta <= delta + tol);
    failures += !(q.gamma >= c2 - tol);
    failures += !(q.beta >= 0.0 && q.beta < 1.0);
  }
  CHECK(failures == 0);
}

TEST_CASE("delta_for_beta inverts the bipiano beta") {
  for (double beta : {0.0, 0.3, 0.75, 0.95}) {
    for (double lipschitz : {0.5, 10.0, 1e4}) {
      const double delta = ipiano::delta_for_beta(beta, lipschitz, 1e-6);
      CHECK(ipiano::bipiano_params(lipschitz, delta, 1e-6).beta ==
            Approx(beta).epsilon(1e-9));
    }
  }
}

TEST_CASE("midpoint general rule stays feasible") {
  const auto rule = ipiano::midpoint_general_rule(0.8);
  double delta_prev = std::numeric_limits<double>::infinity();
  for (double lipschitz : {1.0, 2.0, 2.0, 10.0, 50.0, 50.0}) {
    const ipiano::ScheduleContext ctx{0, lipschitz, delta_prev, rule.c1, rule.c2};
    const double beta = rule.beta_schedule(ctx);
    const double alpha = rule.alpha_schedule(ctx, beta);
    const auto check =
        ipiano::general_param_check(alpha, beta, lipschitz, rule.c1, rule.c2, delta_prev);
    CHECK_MESSAGE(check.ok, check.reason);
    delta_prev = check.delta;
  }
}

TEST_CASE("rule validation") {
  CHECK_NOTHROW(ipiano::validate(ipiano::ConstantRule{0.5, 10.0}));
  CHECK_THROWS_AS(ipiano::validate(ipiano::ConstantRule{1.0, 10.0}), ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::validate(ipiano::ConstantRule{0.5, -1.0}), ipiano::ConfigError);
  ipiano::BacktrackingRule bt;
  bt.eta = 1.0;
  CHECK_THROWS_AS(ipiano::validate(bt), ipiano::ConfigError);
  bt.eta = 2.0;
  bt.delta_init = 1e-9;
  CHECK_THROWS_AS(ipiano::validate(bt), ipiano::ConfigError);
  ipiano::LazyBacktrackingRule lazy;
  lazy.shrink_factor = 0.5;
  CHECK_THROWS_AS(ipiano::validate(lazy), ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::validate(ipiano::GeneralRule{}), ipiano::ConfigError);
  CHECK(ipiano::rule_name(ipiano::midpoint_general_rule(0.2)) == "general");
  CHECK(ipiano::rule_name(lazy) == "lazy");
}
