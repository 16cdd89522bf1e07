#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>

#include "ipiano/objective.hpp"
#include "ipiano/trace.hpp"

namespace ipiano {

// Outcome of a numerical check of one of the convergence inequalities.
//
// worst_slack is the smallest (rhs - lhs) / scale seen over the checked
// iterations, where scale makes it unit-free (1 + |h(x^0)| for energy
// inequalities). satisfied <=> worst_slack >= -tolerance.
struct Certificate {
  std::string name;
  bool satisfied = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t location = 0;
  double tolerance = 0.0;
  std::size_t checked = 0;
  // First iteration of the window the inequalities were checked on.
  std::size_t window_start = 0;
  // Extra measurements that are reported but not asserted.
  std::map<std::string, double> metrics;

  void observe(double slack, std::size_t n);
  void finalize();
};

inline constexpr double kCertificateTolerance = 1e-10;

// r(x) = x - prox(x - grad f(x), 1).
Vector proximal_residual(std::span<const double> x, const Objective& obj);

// First index n0 such that delta_n <= delta_{n-1} (up to rounding) for every
// n > n0. Zero for rules with monotone delta.
std::size_t monotone_delta_start(const Trace& trace);

// First index n0 such that delta_n equals the final delta_N (up to rounding)
// for all n >= n0.
std::size_t constant_delta_start(const Trace& trace);

// Lyapunov descent of H_delta(x, y) = h(x) + delta |x - y|^2:
//  * per step:  h(x^{n+1}) + delta_n D_{n+1}^2 <= H_{delta_n}(x^n, x^{n-1}) - gamma_n D_n^2
//  * literal:   H_{delta_{n+1}}(x^{n+1}, x^n) <= H_{delta_n}(x^n, x^{n-1}) - gamma_n D_n^2
//    wherever delta_{n+1} <= delta_n
//  * summed:    sum gamma_n D_n^2 <= H(start) - H_{delta_{N+1}}(x^{N+1}, x^N)
//    on the suffix where delta is monotone.
//  * admissible: delta_n >= gamma_n >= 0, relative to 1/alpha_n + L_n.
Certificate lyapunov_certificate(const Trace& trace,
                                 double relative_tolerance = kCertificateTolerance);

// Rate bounds on the monotone-delta window starting at n0:
//  * min_{n0 < n <= N+1} D_n^2 <= (H(n0) - h_lower) / (c2 (N - n0 + 1))
//  * partial sums of D_n^2 <= (H(n0) - h_lower) / c2
//  * sum_{n<=N} |r(x^n)| <= (2/c1) sum_{n<=N} |x^{n+1} - x^n|   (all n)
// Throws ConfigError unless c1 <= min(1, min_n alpha_n).
Certificate rate_certificate(const Trace& trace, double c1, double c2,
                             double h_lower = 0.0,
                             double relative_tolerance = kCertificateTolerance);

// Sufficient-decrease (a = c2) and relative-error (b = 7/c1) conditions for
// F = H_delta along z^n = (x^n, x^{n-1}), reconstructing the subgradient
//   w_x = (x^n - x^{n+1})/alpha_n - grad f(x^n) + beta_n/alpha_n (x^n - x^{n-1})
//         + grad f(x^{n+1}) + 2 delta (x^{n+1} - x^n),
//   w_y = -2 delta (x^{n+1} - x^n).
// Needs trace.iterates. Throws ConfigError if delta_n != delta on the window or
// c1 > min alpha_n there.
Certificate h_certificates(const Trace& trace, const Objective& obj, double delta,
                           double c1, double c2, std::size_t window_start = 0,
                           double relative_tolerance = kCertificateTolerance);

// Max over tested coordinates of |fd_i - grad_i| / (1 + |grad_i|) with central
// differences of step h. h <= 0 selects 1e-5 (1 + |x|_inf). At most
// max_coords coordinates are tested, sampled with the given seed.
double grad_check(const std::function<double(std::span<const double>)>& f_value,
                  const std::function<Vector(std::span<const double>)>& f_grad,
                  std::span<const double> x, double h = 0.0,
                  std::size_t max_coords = 64, unsigned seed = 0);

}  // namespace ipiano
