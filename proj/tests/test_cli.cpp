#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "ipiano/errors.hpp"
#include "run_config.hpp"
#include "runners.hpp"

namespace fs = std::filesystem;
using namespace ipiano::cli;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ipiano_test_cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& path) {
  const std::string text = slurp(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

RunConfig small_toy(const fs::path& out) {
  RunConfig cfg;
  cfg.problem = Problem::kToy;
  cfg.grid = 3;
  cfg.max_iters = 2000;
  cfg.out = out;
  return cfg;
}

}  // namespace

TEST_CASE("list and number formatting") {
  CHECK(parse_list("0, 0.4,0.8") == std::vector<double>{0.0, 0.4, 0.8});
  CHECK(parse_list("") == std::vector<double>{});
  CHECK_THROWS_AS(parse_list("1,x"), ipiano::ConfigError);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("problem defaults") {
  const RunConfig toy = resolve(RunConfig{});
  CHECK(toy.rule == "constant");
  CHECK(toy.betas == std::vector<double>{0.0, 0.75});
  CHECK(toy.lambda == 1.0);
  CHECK(toy.h_certificates == true);

  RunConfig d;
  d.problem = Problem::kDenoise;
  const RunConfig den = resolve(d);
  CHECK(den.rule == "lazy");
  CHECK(den.shrink == 1.05);
  CHECK(den.size == 64);
  CHECK(den.lambda == 0.05);
  d.data = "l1";
  CHECK(resolve(d).lambda == 0.5);

  RunConfig m;
  m.problem = Problem::kInpaintMask;
  const RunConfig mask = resolve(m);
  CHECK(mask.rule == "backtracking");
  CHECK(mask.lambda == 1500.0);
  CHECK(mask.shrink == 1.0);
}

TEST_CASE("invalid settings are config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "no_such_key", "1"), ipiano::ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "max_iters", "many"), ipiano::ConfigError);
  CHECK_THROWS_AS(parse_problem("deblur"), ipiano::ConfigError);
  cfg.rule = "newton";
  CHECK_THROWS_AS(resolve(cfg), ipiano::ConfigError);
  cfg = {};
  cfg.betas = {1.0};
  CHECK_THROWS_AS(resolve(cfg), ipiano::ConfigError);
  cfg = {};
  cfg.problem = Problem::kDenoise;
  cfg.data = "huber";
  CHECK_THROWS_AS(resolve(cfg), ipiano::ConfigError);
}

TEST_CASE("config text round trip") {
  RunConfig cfg;
  std::istringstream text(
      "# denoising sweep\nproblem = denoise\nbeta = 0.1, 0.7\nmax_iters=123\n"
      "lambda = 0.3  # inline\ndata = l1\nseed = 9\n");
  apply_config_text(cfg, text);
  CHECK(cfg.problem == Problem::kDenoise);
  CHECK(cfg.betas == std::vector<double>{0.1, 0.7});
  CHECK(cfg.max_iters == 123);
  CHECK(cfg.lambda == 0.3);
  CHECK(cfg.seed == 9);

  const RunConfig resolved = resolve(cfg);
  RunConfig back;
  std::istringstream again(serialize(resolved));
  apply_config_text(back, again);
  CHECK(serialize(back) == serialize(resolved));
  CHECK(serialize(resolve(back)) == serialize(resolved));
}

TEST_CASE("toy run writes one basin row per start") {
  const fs::path out = fresh_dir("toy");
  std::ostringstream log;
  std::ostringstream err;
  CHECK(run(small_toy(out), log, err) == kExitOk);
  CHECK(err.str().empty());
  for (const char* name : {"config.txt", "trace.csv", "basins.csv", "summary.csv",
                           "certificates.csv"}) {
    CHECK(fs::exists(out / name));
  }
  CHECK(line_count(out / "basins.csv") == 1 + 2 * 9);
  CHECK(slurp(out / "trace.csv").rfind("n,f,g,h,alpha,beta,L,delta,gamma", 0) == 0);
  CHECK(slurp(out / "certificates.csv").find(",false,") == std::string::npos);
}

TEST_CASE("runs are deterministic") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  std::ostringstream log;
  std::ostringstream err;
  REQUIRE(run(small_toy(a), log, err) == kExitOk);
  REQUIRE(run(small_toy(b), log, err) == kExitOk);
  for (const char* name : {"trace.csv", "basins.csv", "summary.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  std::ostringstream err;
  RunConfig bad = small_toy(fresh_dir("bad"));
  bad.betas = {-0.5};
  CHECK(run(bad, log, err) == kExitConfigError);
  CHECK_FALSE(err.str().empty());

  RunConfig missing;
  missing.problem = Problem::kDenoise;
  missing.input = "/nonexistent/image.pgm";
  missing.out = fresh_dir("missing");
  CHECK(run(missing, log, err) == kExitConfigError);

  RunConfig diverge = small_toy(fresh_dir("diverge"));
  diverge.rule = "lazy";
  diverge.lipschitz_init = 1e-3;
  diverge.eta = 1e16;
  diverge.start = {-2.0, 3.0};
  CHECK(run(diverge, log, err) == kExitNumericalError);
}

TEST_CASE("denoise and mask runs on tiny images") {
  std::ostringstream log;
  std::ostringstream err;
  RunConfig den;
  den.problem = Problem::kDenoise;
  den.size = 16;
  den.betas = {0.0, 0.8};
  den.max_iters = 200;
  den.reference_iters = 300;
  den.tols = {10.0, 1.0};
  den.out = fresh_dir("denoise");
  CHECK(run(den, log, err) == kExitOk);
  CHECK(fs::exists(den.out / "noisy.pgm"));
  CHECK(line_count(den.out / "iterations.csv") == 1 + 2 * 2);

  RunConfig mask;
  mask.problem = Problem::kInpaintMask;
  mask.size = 12;
  mask.max_iters = 50;
  mask.out = fresh_dir("mask");
  CHECK(run(mask, log, err) == kExitOk);
  CHECK(fs::exists(mask.out / "mask.pgm"));
  CHECK(fs::exists(mask.out / "summary.csv"));
}
