#pragma once

#include <cstddef>
#include <vector>

#include "ipiano/vector_ops.hpp"

namespace ipiano {

// Diagnostics for iteration n, i.e. the step x^n -> x^{n+1}.
// Energies, step_norm and residual_norm describe x^n; the step parameters are
// the ones used to produce x^{n+1}.
struct TraceRecord {
  std::size_t n = 0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lipschitz = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double step_norm = 0.0;  // |x^n - x^{n-1}|, zero at n = 0
  double lyapunov = 0.0;   // h + delta * step_norm^2
  double residual_norm = 0.0;
  int backtracks = 0;
};

// The last iterate x^K, which has no outgoing step.
struct TerminalPoint {
  std::size_t n = 0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double step_norm = 0.0;
  double residual_norm = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  TerminalPoint last;
  // x^0 .. x^K when the solver was asked to keep them; empty otherwise.
  std::vector<Vector> iterates;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  double initial_energy() const { return records.empty() ? last.h : records.front().h; }
  // h and step norm of x^{n+1} for record n.
  double next_energy(std::size_t n) const {
    return n + 1 < records.size() ? records[n + 1].h : last.h;
  }
  double next_step_norm(std::size_t n) const {
    return n + 1 < records.size() ? records[n + 1].step_norm : last.step_norm;
  }
};

}  // namespace ipiano
