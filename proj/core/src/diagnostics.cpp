#include "ipiano/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ipiano/errors.hpp"
#include "ipiano/step_rule.hpp"

namespace ipiano {
namespace {

double sq(double v) { return v * v; }

bool delta_not_increasing(const TraceRecord& prev, const TraceRecord& curr) {
  return curr.delta <= prev.delta + law_tolerance(curr.alpha, curr.lipschitz);
}

bool delta_equal(const TraceRecord& a, const TraceRecord& b) {
  const double tol = law_tolerance(b.alpha, b.lipschitz) + 1e-9 * std::abs(a.delta);
  return std::abs(a.delta - b.delta) <= tol;
}

// H_{delta}(x^{n+1}, x^n) with delta_{n+1} where it exists, delta_n otherwise.
double next_lyapunov(const Trace& trace, std::size_t n) {
  if (n + 1 < trace.records.size()) return trace.records[n + 1].lyapunov;
  return trace.last.h + trace.records[n].delta * sq(trace.last.step_norm);
}

}  // namespace

void Certificate::observe(double slack, std::size_t n) {
  ++checked;
  if (slack < worst_slack) {
    worst_slack = slack;
    location = n;
  }
}

void Certificate::finalize() {
  if (checked == 0) worst_slack = 0.0;
  satisfied = worst_slack >= -tolerance;
}

Vector proximal_residual(std::span<const double> x, const Objective& obj) {
  const Vector grad = obj.smooth_grad(x);
  Vector forward(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) forward[i] = x[i] - grad[i];
  const Vector p = obj.prox(forward, 1.0);
  return subtract(x, p);
}

std::size_t monotone_delta_start(const Trace& trace) {
  const auto& recs = trace.records;
  if (recs.empty()) return 0;
  std::size_t start = recs.size() - 1;
  while (start > 0 && delta_not_increasing(recs[start - 1], recs[start])) --start;
  return start;
}

std::size_t constant_delta_start(const Trace& trace) {
  const auto& recs = trace.records;
  if (recs.empty()) return 0;
  std::size_t start = recs.size() - 1;
  while (start > 0 && delta_equal(recs.back(), recs[start - 1])) --start;
  return start;
}

Certificate lyapunov_certificate(const Trace& trace, double relative_tolerance) {
  Certificate cert;
  cert.name = "lyapunov_descent";
  cert.tolerance = relative_tolerance;
  const auto& recs = trace.records;
  const double scale = 1.0 + std::abs(trace.initial_energy());

  std::size_t skipped = 0;
  double min_gamma = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < recs.size(); ++n) {
    const TraceRecord& r = recs[n];
    // Step law: delta_n >= gamma_n >= 0.
    const double law_scale = 1.0 / r.alpha + r.lipschitz;
    cert.observe(std::min(r.gamma, r.delta - r.gamma) / law_scale, n);
    min_gamma = std::min(min_gamma, r.gamma);

    const double decrease = r.gamma * sq(r.step_norm);
    const double h_next = trace.next_energy(n);
    const double d_next = trace.next_step_norm(n);

    const double per_step = h_next + r.delta * sq(d_next);
    cert.observe((r.lyapunov - decrease - per_step) / scale, n);

    if (n + 1 < recs.size()) {
      if (delta_not_increasing(r, recs[n + 1])) {
        cert.observe((r.lyapunov - decrease - recs[n + 1].lyapunov) / scale, n);
      } else {
        ++skipped;
      }
    }
  }

  const std::size_t start = monotone_delta_start(trace);
  if (!recs.empty()) {
    const double h_start = recs[start].lyapunov;
    double summed = 0.0;
    for (std::size_t n = start; n < recs.size(); ++n) {
      summed += recs[n].gamma * sq(recs[n].step_norm);
      cert.observe((h_start - next_lyapunov(trace, n) - summed) / scale, n);
    }
  }

  cert.window_start = start;
  cert.metrics["literal_skipped"] = static_cast<double>(skipped);
  cert.metrics["gamma_min"] = std::isfinite(min_gamma) ? min_gamma : 0.0;
  cert.metrics["monotone_window_start"] = static_cast<double>(start);
  cert.finalize();
  return cert;
}

Certificate rate_certificate(const Trace& trace, double c1, double c2, double h_lower,
                             double relative_tolerance) {
  const auto& recs = trace.records;
  double min_alpha = 1.0;
  for (const auto& r : recs) min_alpha = std::min(min_alpha, r.alpha);
  if (c1 > min_alpha * (1.0 + 1e-12)) {
    throw ConfigError("rate_certificate: c1=" + std::to_string(c1) +
                      " exceeds min(1, min alpha_n)=" + std::to_string(min_alpha));
  }
  if (!(c2 > 0.0)) throw ConfigError("rate_certificate: c2 must be > 0");

  Certificate cert;
  cert.name = "rate_bounds";
  cert.tolerance = relative_tolerance;
  if (recs.empty()) {
    cert.finalize();
    return cert;
  }

  const std::size_t start = monotone_delta_start(trace);
  const double budget = recs[start].lyapunov - h_lower;
  double mu = std::numeric_limits<double>::infinity();
  double mu_residual = std::numeric_limits<double>::infinity();
  double partial = 0.0;
  double looseness_min = std::numeric_limits<double>::infinity();
  double looseness_final = 0.0;
  double ratio_max = 0.0;
  for (std::size_t n = start; n < recs.size(); ++n) {
    const double d_next_sq = sq(trace.next_step_norm(n));
    mu = std::min(mu, d_next_sq);
    mu_residual = std::min(mu_residual, sq(recs[n].residual_norm));
    partial += d_next_sq;
    const double count = static_cast<double>(n - start + 1);

    const double mu_bound = budget / (c2 * count);
    cert.observe((mu_bound - mu) / (1.0 + mu_bound), n);
    const double sum_bound = budget / c2;
    cert.observe((sum_bound - partial) / (1.0 + sum_bound), n);

    if (mu > 0.0) {
      looseness_final = mu_bound / mu;
      looseness_min = std::min(looseness_min, looseness_final);
      ratio_max = std::max(ratio_max, mu_residual / mu);
    }
  }

  // Summed residual bound holds from n = 0 regardless of delta.
  double residual_sum = 0.0;
  double step_sum = 0.0;
  for (std::size_t n = 0; n < recs.size(); ++n) {
    residual_sum += recs[n].residual_norm;
    step_sum += trace.next_step_norm(n);
    const double bound = 2.0 / c1 * step_sum;
    cert.observe((bound - residual_sum) / (1.0 + bound), n);
  }

  cert.window_start = start;
  cert.metrics["looseness_min"] = looseness_min;
  cert.metrics["looseness_final"] = looseness_final;
  cert.metrics["residual_to_step_ratio_max"] = ratio_max;
  cert.finalize();
  return cert;
}

Certificate h_certificates(const Trace& trace, const Objective& obj, double delta,
                           double c1, double c2, std::size_t window_start,
                           double relative_tolerance) {
  const auto& recs = trace.records;
  if (trace.iterates.size() != recs.size() + 1) {
    throw ConfigError("h_certificates: trace does not carry its iterates");
  }
  if (window_start > recs.size()) {
    throw ConfigError("h_certificates: window start past the end of the trace");
  }
  for (std::size_t n = window_start; n < recs.size(); ++n) {
    TraceRecord ref = recs[n];
    ref.delta = delta;
    if (!delta_equal(ref, recs[n])) {
      throw ConfigError("h_certificates: delta_n=" + std::to_string(recs[n].delta) +
                        " differs from delta=" + std::to_string(delta) +
                        " at iteration " + std::to_string(n));
    }
    if (c1 > recs[n].alpha * (1.0 + 1e-12)) {
      throw ConfigError("h_certificates: c1 exceeds alpha_n at iteration " +
                        std::to_string(n));
    }
  }

  Certificate cert;
  cert.name = "h1_h2";
  cert.tolerance = relative_tolerance;
  cert.window_start = window_start;
  const double scale = 1.0 + std::abs(trace.initial_energy());
  const double b = 7.0 / c1;
  double worst_h1 = std::numeric_limits<double>::infinity();
  double worst_h2 = std::numeric_limits<double>::infinity();

  Vector grad_curr;
  if (window_start < recs.size()) grad_curr = obj.smooth_grad(trace.iterates[window_start]);
  for (std::size_t n = window_start; n < recs.size(); ++n) {
    const TraceRecord& r = recs[n];
    const Vector& x_curr = trace.iterates[n];
    const Vector& x_prev = trace.iterates[n == 0 ? 0 : n - 1];
    const Vector& x_next = trace.iterates[n + 1];
    const double d_curr = r.step_norm;
    const double d_next = trace.next_step_norm(n);

    const double f_now = r.h + delta * sq(d_curr);
    const double f_after = trace.next_energy(n) + delta * sq(d_next);
    const double h1 = (f_now - f_after - c2 * sq(d_curr)) / scale;
    worst_h1 = std::min(worst_h1, h1);
    cert.observe(h1, n);

    Vector grad_next = obj.smooth_grad(x_next);
    double wx_sq = 0.0;
    double wy_sq = 0.0;
    for (std::size_t i = 0; i < x_curr.size(); ++i) {
      const double step = x_next[i] - x_curr[i];
      const double wx = -step / r.alpha - grad_curr[i] +
                        r.beta / r.alpha * (x_curr[i] - x_prev[i]) + grad_next[i] +
                        2.0 * delta * step;
      const double wy = -2.0 * delta * step;
      wx_sq += wx * wx;
      wy_sq += wy * wy;
    }
    const double rhs = b * (d_curr + d_next);
    const double h2 = (rhs - std::sqrt(wx_sq) - std::sqrt(wy_sq)) / (1.0 + rhs);
    worst_h2 = std::min(worst_h2, h2);
    cert.observe(h2, n);
    grad_curr = std::move(grad_next);
  }

  cert.metrics["h1_worst"] = std::isfinite(worst_h1) ? worst_h1 : 0.0;
  cert.metrics["h2_worst"] = std::isfinite(worst_h2) ? worst_h2 : 0.0;
  cert.finalize();
  return cert;
}

double grad_check(const std::function<double(std::span<const double>)>& f_value,
                  const std::function<Vector(std::span<const double>)>& f_grad,
                  std::span<const double> x, double h, std::size_t max_coords,
                  unsigned seed) {
  if (h <= 0.0) h = 1e-5 * (1.0 + norm_inf(x));
  const Vector grad = f_grad(x);

  std::vector<std::size_t> coords(x.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (coords.size() > max_coords) {
    std::mt19937 rng(seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(max_coords);
  }

  Vector probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i : coords) {
    probe[i] = x[i] + h;
    const double up = f_value(probe);
    probe[i] = x[i] - h;
    const double down = f_value(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / (1.0 + std::abs(grad[i])));
  }
  return worst;
}

}  // namespace ipiano
