#include "runners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "ipiano/errors.hpp"
#include "ipiano/image.hpp"
#include "ipiano/problems/compression.hpp"
#include "ipiano/problems/mrf.hpp"
#include "ipiano/problems/toy.hpp"

namespace ipiano::cli {
namespace {

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::ofstream out(cfg.out / name);
  if (!out) throw ConfigError("cannot write " + (cfg.out / name).string());
  return out;
}

void prepare_output(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out.string());
  open_output(cfg, "config.txt") << serialize(cfg);
}

void write_trace_file(const RunConfig& cfg, const std::string& name, const Trace& trace) {
  std::ofstream out = open_output(cfg, name);
  write_trace_csv(out, trace);
}

int finish(const RunConfig& cfg, const std::vector<LabeledCertificate>& certs,
           std::ostream& log) {
  std::ofstream out = open_output(cfg, "certificates.csv");
  write_certificates_csv(out, certs);
  std::size_t failed = 0;
  for (const auto& [label, cert] : certs) {
    if (!cert.satisfied) {
      ++failed;
      log << "certificate " << cert.name << " failed for " << label << " (worst slack "
          << format_number(cert.worst_slack) << " at n=" << cert.location << ")\n";
    }
  }
  log << certs.size() - failed << "/" << certs.size() << " certificates passed\n";
  return failed == 0 ? kExitOk : kExitCertificateFailure;
}

void append(std::vector<LabeledCertificate>& all, const std::string& label,
            const std::vector<Certificate>& certs) {
  for (const Certificate& c : certs) all.emplace_back(label, c);
}

Image load_or_synthesize(const RunConfig& cfg) {
  if (!cfg.input.empty()) return read_image(cfg.input);
  return synthetic_image({cfg.size, cfg.size});
}

double rule_c2(const StepRule& rule) {
  if (const auto* r = std::get_if<BacktrackingRule>(&rule)) return r->c2;
  if (const auto* r = std::get_if<GeneralRule>(&rule)) return r->c2;
  return 0.0;
}

// c2 valid on records [start, end): the rule's own constant, or the smallest
// gamma_n for rules without one.
double window_c2(const Trace& trace, std::size_t start, const StepRule& rule) {
  const double own = rule_c2(rule);
  if (own > 0.0) return own;
  double c2 = std::numeric_limits<double>::infinity();
  for (std::size_t n = start; n < trace.size(); ++n) c2 = std::min(c2, trace.records[n].gamma);
  return std::isfinite(c2) && c2 > 0.0 ? c2 : kDefaultC2;
}

double window_c1(const Trace& trace, std::size_t start) {
  double c1 = 1.0;
  for (std::size_t n = start; n < trace.size(); ++n) c1 = std::min(c1, trace.records[n].alpha);
  return c1;
}

std::string beta_label(const std::string& prefix, double beta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", beta);
  return prefix + "_beta" + buf;
}

}  // namespace

StepRule make_rule(const RunConfig& cfg, double beta, double default_lipschitz) {
  if (cfg.rule == "constant") {
    const double lipschitz = cfg.lipschitz > 0.0 ? cfg.lipschitz : default_lipschitz;
    return ConstantRule{beta, lipschitz, cfg.safety};
  }
  if (cfg.rule == "backtracking") {
    return BacktrackingRule{cfg.c2, std::nullopt, beta, cfg.eta, cfg.lipschitz_init, cfg.shrink};
  }
  if (cfg.rule == "lazy") {
    return LazyBacktrackingRule{beta, cfg.lipschitz_init, cfg.eta, cfg.shrink, cfg.safety};
  }
  if (cfg.rule == "general") {
    return midpoint_general_rule(beta, cfg.c1, cfg.c2, cfg.lipschitz_init, cfg.eta);
  }
  throw ConfigError("unknown rule '" + cfg.rule + "'");
}

std::vector<Certificate> certify(const Trace& trace, const Objective& obj,
                                 const StepRule& rule, bool with_h_certificates) {
  std::vector<Certificate> certs;
  certs.push_back(lyapunov_certificate(trace));

  const std::size_t monotone = monotone_delta_start(trace);
  certs.push_back(rate_certificate(trace, window_c1(trace, 0), window_c2(trace, monotone, rule),
                                   obj.lower_bound));

  if (with_h_certificates && !trace.empty() && trace.iterates.size() == trace.size() + 1) {
    const std::size_t start = constant_delta_start(trace);
    certs.push_back(h_certificates(trace, obj, trace.records.back().delta,
                                   window_c1(trace, start), window_c2(trace, start, rule),
                                   start));
  }
  return certs;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "n,f,g,h,alpha,beta,L,delta,gamma,step_norm,residual,lyapunov,backtracks\n";
  for (const TraceRecord& r : trace.records) {
    out << r.n << ',' << format_number(r.f) << ',' << format_number(r.g) << ','
        << format_number(r.h) << ',' << format_number(r.alpha) << ',' << format_number(r.beta)
        << ',' << format_number(r.lipschitz) << ',' << format_number(r.delta) << ','
        << format_number(r.gamma) << ',' << format_number(r.step_norm) << ','
        << format_number(r.residual_norm) << ',' << format_number(r.lyapunov) << ','
        << r.backtracks << '\n';
  }
  // The last iterate has no outgoing step, so its step parameters are empty.
  const TerminalPoint& t = trace.last;
  out << t.n << ',' << format_number(t.f) << ',' << format_number(t.g) << ','
      << format_number(t.h) << ",,,,,," << format_number(t.step_norm) << ','
      << format_number(t.residual_norm) << ",,\n";
}

void write_certificates_csv(std::ostream& out, const std::vector<LabeledCertificate>& certs) {
  out << "run,certificate,satisfied,worst_slack,location,window_start,checked,metrics\n";
  for (const auto& [label, c] : certs) {
    out << label << ',' << c.name << ',' << (c.satisfied ? 1 : 0) << ','
        << format_number(c.worst_slack) << ',' << c.location << ',' << c.window_start << ','
        << c.checked << ',';
    bool first = true;
    for (const auto& [key, value] : c.metrics) {
      out << (first ? "" : ";") << key << '=' << format_number(value);
      first = false;
    }
    out << '\n';
  }
}

int run_toy(const RunConfig& cfg, std::ostream& log) {
  prepare_output(cfg);
  ToyProblem prob;
  prob.lambda = *cfg.lambda;
  if (cfg.start.size() != prob.u0.size()) {
    throw ConfigError("toy: start must have " + std::to_string(prob.u0.size()) + " entries");
  }
  const Objective obj = toy_objective(prob);
  const std::vector<Vector> minima = toy_stationary_points(prob);
  const double h_global = obj.value(toy_global_minimizer(prob));

  StopCriterion stop;
  stop.max_iters = cfg.max_iters;
  stop.tol_residual = cfg.tol;
  SolveOptions options;
  options.keep_iterates = *cfg.h_certificates;

  std::vector<LabeledCertificate> certs;
  std::ofstream basins = open_output(cfg, "basins.csv");
  basins << "beta,x0_1,x0_2,x_1,x_2,h,iterations,reason,residual,nearest_minimum,distance,"
            "global\n";
  std::ofstream summary = open_output(cfg, "summary.csv");
  summary << "beta,runs,global_fraction\n";

  for (std::size_t k = 0; k < cfg.betas.size(); ++k) {
    const double beta = cfg.betas[k];
    const StepRule rule = make_rule(cfg, beta, prob.lipschitz());

    const SolveResult rep = solve(obj, rule, cfg.start, stop, options);
    append(certs, beta_label("start", beta), certify(rep.trace, obj, rule, *cfg.h_certificates));
    write_trace_file(cfg, k == 0 ? "trace.csv" : "trace_" + std::to_string(k) + ".csv",
                     rep.trace);

    std::size_t global = 0;
    const std::size_t side = cfg.grid;
    const double span = cfg.grid_max - cfg.grid_min;
    const auto coordinate = [&](std::size_t i) {
      if (side == 1) return cfg.grid_min + 0.5 * span;
      return cfg.grid_min + span * static_cast<double>(i) / static_cast<double>(side - 1);
    };
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        const Vector x0 = {coordinate(i), coordinate(j)};
        const SolveResult r = solve(obj, rule, x0, stop, options);
        append(certs, beta_label("basin", beta) + "_" + std::to_string(i) + "_" + std::to_string(j),
               certify(r.trace, obj, rule, *cfg.h_certificates));
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < minima.size(); ++m) {
          const double d = distance(r.x, minima[m]);
          if (d < best) {
            best = d;
            nearest = m;
          }
        }
        const bool reached_global = r.trace.last.h <= h_global + 1e-3;
        global += reached_global;
        basins << format_number(beta) << ',' << format_number(x0[0]) << ','
               << format_number(x0[1]) << ',' << format_number(r.x[0]) << ','
               << format_number(r.x[1]) << ',' << format_number(r.trace.last.h) << ','
               << r.trace.size() << ',' << to_string(r.reason) << ','
               << format_number(r.trace.last.residual_norm) << ',' << nearest << ','
               << format_number(best) << ',' << (reached_global ? 1 : 0) << '\n';
      }
    }
    const double fraction = static_cast<double>(global) / static_cast<double>(side * side);
    summary << format_number(beta) << ',' << side * side << ',' << format_number(fraction) << '\n';
    log << "toy beta=" << beta << ": " << global << "/" << side * side
        << " starts reach the global minimum\n";
  }
  return finish(cfg, certs, log);
}

int run_denoise(const RunConfig& cfg, std::ostream& log) {
  prepare_output(cfg);
  const Image clean = load_or_synthesize(cfg);
  const NoiseSpec noise = cfg.sp_fraction > 0.0 ? NoiseSpec{SaltPepperNoise{cfg.sp_fraction}}
                                                : NoiseSpec{GaussianNoise{cfg.sigma}};
  const Image noisy = add_noise(clean, noise, cfg.seed);
  write_pgm(cfg.out / "clean.pgm", clean);
  write_pgm(cfg.out / "noisy.pgm", noisy);

  const MrfData data = cfg.data == "l1" ? MrfData::kL1 : MrfData::kL2;
  const MRFModel model = make_dct_mrf_model(noisy, data, *cfg.lambda);
  const Objective obj = mrf_objective(model);
  const double bound = mrf_lipschitz_bound(model);
  const Vector x0 = mrf_initial_point(model);
  SolveOptions options;
  options.keep_iterates = *cfg.h_certificates;
  std::vector<LabeledCertificate> certs;

  const StepRule reference_rule = make_rule(cfg, cfg.reference_beta, bound);
  StopCriterion reference_stop;
  reference_stop.max_iters = cfg.reference_iters;
  reference_stop.tol_residual = cfg.tol;
  const SolveResult reference = solve(obj, reference_rule, x0, reference_stop, options);
  double h_star = reference.trace.last.h;
  for (const TraceRecord& r : reference.trace.records) h_star = std::min(h_star, r.h);
  append(certs, "reference",
         certify(reference.trace, obj, reference_rule, *cfg.h_certificates));
  write_trace_file(cfg, "trace_reference.csv", reference.trace);
  write_pgm(cfg.out / "denoised.pgm", Image{model.shape, reference.x});
  log << "denoise: h* = " << format_number(h_star) << " after " << reference.trace.size()
      << " reference iterations\n";

  std::ofstream table = open_output(cfg, "iterations.csv");
  table << "beta,tol,iterations\n";
  std::ofstream summary = open_output(cfg, "summary.csv");
  summary << "run,beta,iterations,final_h,mse\n";
  summary << "noisy,," << 0 << ',' << format_number(obj.value(noisy.pixels)) << ','
          << format_number(mse(noisy.pixels, clean.pixels)) << '\n';
  summary << "reference," << format_number(cfg.reference_beta) << ',' << reference.trace.size()
          << ',' << format_number(reference.trace.last.h) << ','
          << format_number(mse(reference.x, clean.pixels)) << '\n';

  const double finest = *std::min_element(cfg.tols.begin(), cfg.tols.end());
  for (std::size_t k = 0; k < cfg.betas.size(); ++k) {
    const double beta = cfg.betas[k];
    const StepRule rule = make_rule(cfg, beta, bound);
    StopCriterion stop;
    stop.max_iters = cfg.max_iters;
    stop.tol_residual = cfg.tol;
    stop.target = TargetEnergy{h_star, finest};
    const SolveResult r = solve(obj, rule, x0, stop, options);
    append(certs, beta_label("run", beta), certify(r.trace, obj, rule, *cfg.h_certificates));
    if (k == 0) write_trace_file(cfg, "trace.csv", r.trace);

    for (const double tol : cfg.tols) {
      table << format_number(beta) << ',' << format_number(tol) << ',';
      std::optional<std::size_t> first;
      for (const TraceRecord& rec : r.trace.records) {
        if (rec.h - h_star <= tol) {
          first = rec.n;
          break;
        }
      }
      if (!first && r.trace.last.h - h_star <= tol) first = r.trace.last.n;
      if (first) table << *first;
      table << '\n';
    }
    summary << "beta," << format_number(beta) << ',' << r.trace.size() << ','
            << format_number(r.trace.last.h) << ',' << format_number(mse(r.x, clean.pixels))
            << '\n';
    log << "denoise beta=" << beta << ": " << r.trace.size() << " iterations ("
        << to_string(r.reason) << ")\n";
  }
  return finish(cfg, certs, log);
}

int run_inpaint_mask(const RunConfig& cfg, std::ostream& log) {
  prepare_output(cfg);
  const Image image = load_or_synthesize(cfg);
  const CompressionModel model = make_compression_model(image, *cfg.lambda);
  const Objective obj = compression_objective(model);
  const Vector c0 = compression_initial_mask(model);
  write_pgm(cfg.out / "original.pgm", image);

  StopCriterion stop;
  stop.max_iters = cfg.max_iters;
  stop.tol_residual = cfg.tol;
  SolveOptions options;
  options.keep_iterates = *cfg.h_certificates;

  // The constant rule needs a Lipschitz constant; f has none globally, so
  // without an explicit one take twice the largest value a backtracking run
  // accepts along the same path.
  double default_lipschitz = cfg.lipschitz;
  if (cfg.rule == "constant" && default_lipschitz <= 0.0) {
    RunConfig pilot_cfg = cfg;
    pilot_cfg.rule = "backtracking";
    const SolveResult pilot =
        solve(obj, make_rule(pilot_cfg, cfg.betas.front(), 1.0), c0, stop);
    for (const TraceRecord& r : pilot.trace.records) {
      default_lipschitz = std::max(default_lipschitz, 2.0 * r.lipschitz);
    }
    log << "inpaint-mask: constant rule uses L = " << format_number(default_lipschitz)
        << " from a backtracking pilot run\n";
  }

  std::vector<LabeledCertificate> certs;
  std::ofstream summary = open_output(cfg, "summary.csv");
  summary << "beta,iterations,initial_energy,final_energy,density_percent,mse\n";
  for (std::size_t k = 0; k < cfg.betas.size(); ++k) {
    const double beta = cfg.betas[k];
    const StepRule rule = make_rule(cfg, beta, default_lipschitz);
    const SolveResult r = solve(obj, rule, c0, stop, options);
    append(certs, beta_label("run", beta), certify(r.trace, obj, rule, *cfg.h_certificates));
    const Vector u = compression_reconstruct(r.x, model);
    const double density = mask_density(r.x);
    const double error = mse(u, model.u0);
    summary << format_number(beta) << ',' << r.trace.size() << ','
            << format_number(r.trace.initial_energy()) << ',' << format_number(r.trace.last.h)
            << ',' << format_number(100.0 * density) << ',' << format_number(error) << '\n';
    if (k == 0) {
      write_trace_file(cfg, "trace.csv", r.trace);
      Image mask{model.shape, Vector(r.x.size())};
      for (std::size_t i = 0; i < r.x.size(); ++i) {
        mask.pixels[i] = std::abs(r.x[i]) > 1e-8 ? 255.0 : 0.0;
      }
      write_pgm(cfg.out / "mask.pgm", mask);
      write_pgm(cfg.out / "reconstruction.pgm", Image{model.shape, u});
    }
    log << "inpaint-mask beta=" << beta << ": energy " << format_number(r.trace.last.h)
        << ", density " << 100.0 * density << "%, MSE " << error << "\n";
  }
  return finish(cfg, certs, log);
}

int run(const RunConfig& raw, std::ostream& log, std::ostream& err) {
  try {
    const RunConfig cfg = resolve(raw);
    switch (cfg.problem) {
      case Problem::kToy:
        return run_toy(cfg, log);
      case Problem::kDenoise:
        return run_denoise(cfg, log);
      case Problem::kInpaintMask:
        return run_inpaint_mask(cfg, log);
    }
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace ipiano::cli
