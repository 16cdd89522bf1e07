#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ipiano::cli {

enum class Problem { kToy, kDenoise, kInpaintMask };

// Everything a run needs. Unset optionals resolve to per-problem defaults in
// resolve(); the resolved config is what gets written next to the outputs.
struct RunConfig {
  Problem problem = Problem::kToy;
  std::string rule;  // constant | backtracking | lazy | general
  std::vector<double> betas;
  std::size_t max_iters = 0;
  double tol = -1.0;  // residual tolerance; negative means "problem default"
  std::uint64_t seed = 1;
  std::optional<double> lambda;
  double sigma = 25.0;
  double sp_fraction = 0.0;
  std::string data = "l2";  // denoise data term: l2 | l1
  std::filesystem::path input;
  std::size_t size = 0;  // side of the synthetic image when no input is given
  std::filesystem::path out = "out";

  // Step-rule constants.
  double lipschitz = 0.0;  // constant rule; 0 = derive from the problem
  double lipschitz_init = 1.0;
  double eta = 1.2;
  double c1 = 1e-8;
  double c2 = 1e-6;
  double safety = 0.995;
  double shrink = 0.0;  // 0 = rule default (1.05 lazy, 1 otherwise)

  // toy
  std::size_t grid = 10;
  double grid_min = -2.0;
  double grid_max = 3.0;
  std::vector<double> start;

  // denoise
  std::size_t reference_iters = 5000;
  double reference_beta = 0.8;
  std::vector<double> tols;

  std::optional<bool> h_certificates;
};

std::string to_string(Problem problem);
Problem parse_problem(const std::string& text);

// Fills every "problem default" field. Throws ConfigError on invalid values.
RunConfig resolve(RunConfig cfg);

// key=value lines; '#' starts a comment. Unknown keys throw ConfigError.
void apply_config_text(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
// Applies one key=value pair.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Round-trips through apply_config_text.
std::string serialize(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& text);
std::string format_number(double value);

}  // namespace ipiano::cli
