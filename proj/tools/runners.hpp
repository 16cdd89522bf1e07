#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ipiano/diagnostics.hpp"
#include "ipiano/solver.hpp"
#include "run_config.hpp"

namespace ipiano::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

// The configured rule family at one beta. default_lipschitz feeds the
// constant rule when cfg.lipschitz is 0.
StepRule make_rule(const RunConfig& cfg, double beta, double default_lipschitz);

// Lyapunov, rate and (when the trace carries iterates and cfg asks for them)
// H1/H2 certificates for one run.
std::vector<Certificate> certify(const Trace& trace, const Objective& obj,
                                 const StepRule& rule, bool with_h_certificates);

using LabeledCertificate = std::pair<std::string, Certificate>;

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_certificates_csv(std::ostream& out, const std::vector<LabeledCertificate>& certs);

// Each runner expects a resolved config, writes its artifacts under cfg.out
// and returns kExitOk or kExitCertificateFailure. Errors propagate as
// exceptions.
int run_toy(const RunConfig& cfg, std::ostream& log);
int run_denoise(const RunConfig& cfg, std::ostream& log);
int run_inpaint_mask(const RunConfig& cfg, std::ostream& log);

// Resolves cfg, dispatches on cfg.problem and maps errors to exit codes.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace ipiano::cli
