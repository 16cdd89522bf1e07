#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ipiano/errors.hpp"
#include "run_config.hpp"
#include "runners.hpp"

namespace {

struct Overrides {
  std::optional<std::string> beta;
  std::optional<std::string> rule;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::optional<double> sp_fraction;
  std::optional<std::string> out;
  std::optional<std::string> input;
  std::optional<std::string> data;
  std::optional<std::string> config;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key=value config file; flags override it");
  cmd->add_option("--beta", o.beta, "inertial parameter(s), comma separated");
  cmd->add_option("--rule", o.rule, "step rule")
      ->check(CLI::IsMember({"constant", "backtracking", "lazy", "general"}));
  cmd->add_option("--max-iters", o.max_iters, "iteration cap per run");
  cmd->add_option("--tol", o.tol, "proximal residual tolerance");
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--lambda", o.lambda, "regularization weight");
  cmd->add_option("--out", o.out, "output directory");
}

void add_image_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--input", o.input, "input image (.pgm or .png); synthetic if omitted");
}

ipiano::cli::RunConfig build_config(ipiano::cli::Problem problem, const Overrides& o) {
  using ipiano::cli::apply_setting;
  ipiano::cli::RunConfig cfg;
  if (o.config) ipiano::cli::apply_config_file(cfg, *o.config);
  cfg.problem = problem;
  if (o.beta) apply_setting(cfg, "beta", *o.beta);
  if (o.rule) cfg.rule = *o.rule;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (o.tol) cfg.tol = *o.tol;
  if (o.seed) cfg.seed = *o.seed;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.sigma) cfg.sigma = *o.sigma;
  if (o.sp_fraction) cfg.sp_fraction = *o.sp_fraction;
  if (o.out) cfg.out = *o.out;
  if (o.input) cfg.input = *o.input;
  if (o.data) cfg.data = *o.data;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial proximal gradient experiments with convergence certificates"};
  app.require_subcommand(1);
  Overrides o;

  auto* toy = app.add_subcommand("toy", "2-D l1-regularized Student-t basin experiment");
  add_common_flags(toy, o);

  auto* denoise = app.add_subcommand("denoise", "MRF denoising with a DCT filter prior");
  add_common_flags(denoise, o);
  add_image_flags(denoise, o);
  denoise->add_option("--sigma", o.sigma, "Gaussian noise standard deviation");
  denoise->add_option("--sp-fraction", o.sp_fraction,
                      "salt & pepper fraction (replaces Gaussian noise when > 0)");
  denoise->add_option("--data", o.data, "data term")->check(CLI::IsMember({"l2", "l1"}));

  auto* inpaint = app.add_subcommand("inpaint-mask", "diffusion inpainting mask optimization");
  add_common_flags(inpaint, o);
  add_image_flags(inpaint, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ipiano::cli::kExitConfigError;
  }

  ipiano::cli::Problem problem = ipiano::cli::Problem::kToy;
  if (denoise->parsed()) problem = ipiano::cli::Problem::kDenoise;
  if (inpaint->parsed()) problem = ipiano::cli::Problem::kInpaintMask;

  ipiano::cli::RunConfig cfg;
  try {
    cfg = build_config(problem, o);
  } catch (const ipiano::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return ipiano::cli::kExitConfigError;
  }
  return ipiano::cli::run(cfg, std::cout, std::cerr);
}
