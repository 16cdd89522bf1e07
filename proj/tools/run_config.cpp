#include "run_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ipiano/errors.hpp"

namespace ipiano::cli {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("config: " + key + " expects a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || *end != '\0' || errno == ERANGE) {
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    values.push_back(parse_double("list", item));
  }
  return values;
}

std::string to_string(Problem problem) {
  switch (problem) {
    case Problem::kToy:
      return "toy";
    case Problem::kDenoise:
      return "denoise";
    case Problem::kInpaintMask:
      return "inpaint-mask";
  }
  return "unknown";
}

Problem parse_problem(const std::string& text) {
  const std::string t = trim(text);
  if (t == "toy") return Problem::kToy;
  if (t == "denoise") return Problem::kDenoise;
  if (t == "inpaint-mask") return Problem::kInpaintMask;
  throw ConfigError("config: unknown problem '" + text + "'");
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "problem") {
    cfg.problem = parse_problem(value);
  } else if (key == "rule") {
    cfg.rule = trim(value);
  } else if (key == "beta") {
    cfg.betas = parse_list(value);
  } else if (key == "max_iters") {
    cfg.max_iters = parse_unsigned(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "sigma") {
    cfg.sigma = parse_double(key, value);
  } else if (key == "sp_fraction") {
    cfg.sp_fraction = parse_double(key, value);
  } else if (key == "data") {
    cfg.data = trim(value);
  } else if (key == "input") {
    cfg.input = trim(value);
  } else if (key == "size") {
    cfg.size = parse_unsigned(key, value);
  } else if (key == "out") {
    cfg.out = trim(value);
  } else if (key == "lipschitz") {
    cfg.lipschitz = parse_double(key, value);
  } else if (key == "lipschitz_init") {
    cfg.lipschitz_init = parse_double(key, value);
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "c1") {
    cfg.c1 = parse_double(key, value);
  } else if (key == "c2") {
    cfg.c2 = parse_double(key, value);
  } else if (key == "safety") {
    cfg.safety = parse_double(key, value);
  } else if (key == "shrink") {
    cfg.shrink = parse_double(key, value);
  } else if (key == "grid") {
    cfg.grid = parse_unsigned(key, value);
  } else if (key == "grid_min") {
    cfg.grid_min = parse_double(key, value);
  } else if (key == "grid_max") {
    cfg.grid_max = parse_double(key, value);
  } else if (key == "start") {
    cfg.start = parse_list(value);
  } else if (key == "reference_iters") {
    cfg.reference_iters = parse_unsigned(key, value);
  } else if (key == "reference_beta") {
    cfg.reference_beta = parse_double(key, value);
  } else if (key == "tols") {
    cfg.tols = parse_list(value);
  } else if (key == "h_certificates") {
    cfg.h_certificates = parse_bool(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config_text(cfg, in);
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  out << "problem=" << to_string(cfg.problem) << '\n'
      << "rule=" << cfg.rule << '\n'
      << "beta=" << join(cfg.betas) << '\n'
      << "max_iters=" << cfg.max_iters << '\n'
      << "tol=" << format_number(cfg.tol) << '\n'
      << "seed=" << cfg.seed << '\n';
  if (cfg.lambda) out << "lambda=" << format_number(*cfg.lambda) << '\n';
  out << "sigma=" << format_number(cfg.sigma) << '\n'
      << "sp_fraction=" << format_number(cfg.sp_fraction) << '\n'
      << "data=" << cfg.data << '\n'
      << "input=" << cfg.input.string() << '\n'
      << "size=" << cfg.size << '\n'
      << "out=" << cfg.out.string() << '\n'
      << "lipschitz=" << format_number(cfg.lipschitz) << '\n'
      << "lipschitz_init=" << format_number(cfg.lipschitz_init) << '\n'
      << "eta=" << format_number(cfg.eta) << '\n'
      << "c1=" << format_number(cfg.c1) << '\n'
      << "c2=" << format_number(cfg.c2) << '\n'
      << "safety=" << format_number(cfg.safety) << '\n'
      << "shrink=" << format_number(cfg.shrink) << '\n'
      << "grid=" << cfg.grid << '\n'
      << "grid_min=" << format_number(cfg.grid_min) << '\n'
      << "grid_max=" << format_number(cfg.grid_max) << '\n'
      << "start=" << join(cfg.start) << '\n'
      << "reference_iters=" << cfg.reference_iters << '\n'
      << "reference_beta=" << format_number(cfg.reference_beta) << '\n'
      << "tols=" << join(cfg.tols) << '\n';
  if (cfg.h_certificates) out << "h_certificates=" << (*cfg.h_certificates ? "true" : "false") << '\n';
  return out.str();
}

RunConfig resolve(RunConfig cfg) {
  switch (cfg.problem) {
    case Problem::kToy:
      if (cfg.rule.empty()) cfg.rule = "constant";
      if (cfg.betas.empty()) cfg.betas = {0.0, 0.75};
      if (cfg.max_iters == 0) cfg.max_iters = 10000;
      if (cfg.tol < 0.0) cfg.tol = 1e-8;
      if (!cfg.lambda) cfg.lambda = 1.0;
      if (cfg.start.empty()) cfg.start = {-2.0, 3.0};
      if (!cfg.h_certificates) cfg.h_certificates = true;
      break;
    case Problem::kDenoise:
      if (cfg.rule.empty()) cfg.rule = "lazy";
      if (cfg.betas.empty()) cfg.betas = {0.0, 0.4, 0.8};
      if (cfg.max_iters == 0) cfg.max_iters = 20000;
      if (cfg.tol < 0.0) cfg.tol = 0.0;
      if (!cfg.lambda) cfg.lambda = cfg.data == "l1" ? 0.5 : 0.05;
      if (cfg.size == 0) cfg.size = 64;
      if (cfg.tols.empty()) cfg.tols = {1e3, 1e2, 1e1, 1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
      if (!cfg.h_certificates) cfg.h_certificates = false;
      break;
    case Problem::kInpaintMask:
      if (cfg.rule.empty()) cfg.rule = "backtracking";
      if (cfg.betas.empty()) cfg.betas = {0.8};
      if (cfg.max_iters == 0) cfg.max_iters = 2000;
      if (cfg.tol < 0.0) cfg.tol = 0.0;
      if (!cfg.lambda) cfg.lambda = 1500.0;
      if (cfg.size == 0) cfg.size = 32;
      if (!cfg.h_certificates) cfg.h_certificates = true;
      break;
  }
  if (cfg.shrink == 0.0) cfg.shrink = cfg.rule == "lazy" ? 1.05 : 1.0;

  require(cfg.rule == "constant" || cfg.rule == "backtracking" || cfg.rule == "lazy" ||
              cfg.rule == "general",
          "rule must be one of constant, backtracking, lazy, general (got '" + cfg.rule + "')");
  for (const double b : cfg.betas) require(b >= 0.0 && b < 1.0, "beta must lie in [0, 1)");
  require(cfg.reference_beta >= 0.0 && cfg.reference_beta < 1.0,
          "reference_beta must lie in [0, 1)");
  require(*cfg.lambda >= 0.0, "lambda must be >= 0");
  require(cfg.sigma >= 0.0, "sigma must be >= 0");
  require(cfg.sp_fraction >= 0.0 && cfg.sp_fraction <= 1.0, "sp_fraction must lie in [0, 1]");
  require(cfg.data == "l2" || cfg.data == "l1", "data must be l2 or l1");
  require(cfg.lipschitz >= 0.0, "lipschitz must be >= 0");
  require(cfg.lipschitz_init > 0.0, "lipschitz_init must be > 0");
  require(cfg.eta > 1.0, "eta must be > 1");
  require(cfg.c1 > 0.0 && cfg.c2 > 0.0, "c1 and c2 must be > 0");
  require(cfg.safety > 0.0 && cfg.safety < 1.0, "safety must lie in (0, 1)");
  require(cfg.shrink >= 1.0, "shrink must be >= 1");
  require(cfg.grid >= 1, "grid must be >= 1");
  require(cfg.grid_min < cfg.grid_max, "grid_min must be below grid_max");
  require(cfg.tol >= 0.0, "tol must be >= 0");
  return cfg;
}

}  // namespace ipiano::cli
