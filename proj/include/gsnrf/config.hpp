#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsnrf/covariance.hpp"
#include "gsnrf/errors.hpp"
#include "gsnrf/gsn.hpp"
#include "gsnrf/taildep.hpp"

namespace gsnrf {

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ConfigError"; }
};

class UnknownKey : public ConfigError {
 public:
  explicit UnknownKey(std::string key)
      : ConfigError("unknown configuration key '" + key + "'"), key_(std::move(key)) {}
  const char* kind() const noexcept override { return "UnknownKey"; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class DomainViolation : public ConfigError {
 public:
  DomainViolation(std::string key, std::string value, std::string allowed)
      : ConfigError("'" + key + "' = '" + value + "' is outside the allowed range " + allowed),
        key_(std::move(key)),
        value_(std::move(value)),
        allowed_(std::move(allowed)) {}
  const char* kind() const noexcept override { return "DomainViolation"; }
  const std::string& key() const noexcept { return key_; }
  const std::string& value() const noexcept { return value_; }
  const std::string& allowed() const noexcept { return allowed_; }

 private:
  std::string key_, value_, allowed_;
};

/// --help was requested; carries the usage text.
class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

enum class Command { ChibarCurve, MomentsSurface, Simulate, Prop1, Validate };
enum class FieldModel { Sgrf, Mixture };

inline const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::ChibarCurve: return "chibar-curve";
    case Command::MomentsSurface: return "moments-surface";
    case Command::Simulate: return "simulate";
    case Command::Prop1: return "prop1";
    case Command::Validate: return "validate";
  }
  return "validate";
}

struct RunConfig {
  Command command = Command::Validate;
  std::uint64_t seed = 20240101;
  std::string output_dir = ".";
  bool emit_plots = false;
  bool emit_latents = false;
  bool quick = false;
  bool combined = false;

  // Unset pair parameters select the full configuration battery.
  std::optional<double> rho, delta1, delta2;
  double zeta = kDefaultZeta;
  RootKind root = RootKind::Symmetric;

  double gamma = 1.0;
  double nu = 0.5;
  double tau = 1.0;    // nugget standard deviation
  double sigma = 1.0;  // scale of W
  double mu = 0.0;
  MaternParams matern{};
  long n_reps = 1000;
  std::string sites;  // site CSV; empty means a 5 x 5 unit grid
  FieldModel model = FieldModel::Sgrf;

  std::set<std::string> explicit_keys;  // keys set by file or flag
  bool has(const std::string& key) const { return explicit_keys.count(key) > 0; }
};

namespace detail {

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "command", "seed",  "out",   "rho",    "delta1", "delta2",     "zeta",
      "gamma",   "nu",    "tau",   "sigma",  "mu",     "psi",        "xi",
      "n_reps",  "sites", "model", "root",   "quick",  "emit_plots", "emit_latents",
      "combined"};
  return keys;
}

inline bool is_flag_key(const std::string& key) {
  return key == "quick" || key == "emit_plots" || key == "emit_latents" || key == "combined";
}

inline std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value,
                         const std::string& allowed) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw DomainViolation(key, value, allowed);
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw DomainViolation(key, value, "{true, false}");
}

}  // namespace detail

/// Parses flat `key = value` text. `#` starts a comment; keys may use - or _.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::normalize_key(detail::trim(line.substr(0, eq)));
    const auto& keys = detail::config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UnknownKey(key);
    out[key] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

/// Builds a validated RunConfig from key/value pairs. Keys are checked in a
/// fixed order so the first offending key is reported deterministically.
inline RunConfig build_config(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  for (const auto& [key, value] : kv) {
    const auto& keys = detail::config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UnknownKey(key);
    c.explicit_keys.insert(key);
  }
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const double inf = std::numeric_limits<double>::infinity();
  auto real_in = [&](const std::string& key, double lo, double hi, bool lo_open, bool hi_open,
                     const std::string& allowed) -> std::optional<double> {
    const std::string* v = get(key);
    if (!v) return std::nullopt;
    const double x = detail::parse_real(key, *v, allowed);
    const bool ok_lo = lo_open ? x > lo : x >= lo;
    const bool ok_hi = hi_open ? x < hi : x <= hi;
    if (!ok_lo || !ok_hi) throw DomainViolation(key, *v, allowed);
    return x;
  };

  if (const auto* v = get("command")) {
    if (*v == "chibar-curve") c.command = Command::ChibarCurve;
    else if (*v == "moments-surface") c.command = Command::MomentsSurface;
    else if (*v == "simulate") c.command = Command::Simulate;
    else if (*v == "prop1") c.command = Command::Prop1;
    else if (*v == "validate") c.command = Command::Validate;
    else throw DomainViolation("command", *v, "{chibar-curve, moments-surface, simulate, prop1, validate}");
  }
  if (const auto* v = get("seed")) {
    const std::string allowed = "[0, 2^64 - 1]";
    if (v->empty() || v->find_first_not_of("0123456789") != std::string::npos) {
      throw DomainViolation("seed", *v, allowed);
    }
    try {
      c.seed = std::stoull(*v);
    } catch (const std::logic_error&) {
      throw DomainViolation("seed", *v, allowed);
    }
  }
  if (const auto* v = get("out")) {
    if (v->empty()) throw DomainViolation("out", *v, "a non-empty path");
    c.output_dir = *v;
  }
  if (auto x = real_in("rho", -1, 1, true, true, "(-1, 1)")) c.rho = *x;
  if (auto x = real_in("delta1", -inf, inf, true, true, "(-inf, inf)")) c.delta1 = *x;
  if (auto x = real_in("delta2", -inf, inf, true, true, "(-inf, inf)")) c.delta2 = *x;
  if (auto x = real_in("zeta", 0, 0.5, true, true, "(0, 0.5)")) c.zeta = *x;
  if (auto x = real_in("gamma", -inf, inf, true, true, "(-inf, inf)")) c.gamma = *x;
  if (auto x = real_in("nu", 0, inf, false, true, "[0, inf)")) c.nu = *x;
  if (auto x = real_in("tau", 0, inf, false, true, "[0, inf)")) c.tau = *x;
  if (auto x = real_in("sigma", 0, inf, true, true, "(0, inf)")) c.sigma = *x;
  if (auto x = real_in("mu", -inf, inf, true, true, "(-inf, inf)")) c.mu = *x;
  if (auto x = real_in("psi", 0, inf, true, true, "(0, inf)")) c.matern.psi = *x;
  if (const auto* v = get("xi")) {
    const double x = detail::parse_real("xi", *v, "{0.5, 1.5, 2.5}");
    if (x != 0.5 && x != 1.5 && x != 2.5) throw DomainViolation("xi", *v, "{0.5, 1.5, 2.5}");
    c.matern.xi = smoothness_from(x);
  }
  if (const auto* v = get("n_reps")) {
    const std::string allowed = "integers in [2, 100000000]";
    if (v->empty() || v->find_first_not_of("0123456789") != std::string::npos || v->size() > 9) {
      throw DomainViolation("n_reps", *v, allowed);
    }
    c.n_reps = std::stol(*v);
    if (c.n_reps < 2 || c.n_reps > 100000000) throw DomainViolation("n_reps", *v, allowed);
  }
  if (const auto* v = get("sites")) c.sites = *v;
  if (const auto* v = get("model")) {
    if (*v == "sgrf") c.model = FieldModel::Sgrf;
    else if (*v == "mixture") c.model = FieldModel::Mixture;
    else throw DomainViolation("model", *v, "{sgrf, mixture}");
  }
  if (const auto* v = get("root")) {
    if (*v == "symmetric") c.root = RootKind::Symmetric;
    else if (*v == "cholesky") c.root = RootKind::Cholesky;
    else throw DomainViolation("root", *v, "{symmetric, cholesky}");
  }
  if (const auto* v = get("quick")) c.quick = detail::parse_bool("quick", *v);
  if (const auto* v = get("emit_plots")) c.emit_plots = detail::parse_bool("emit_plots", *v);
  if (const auto* v = get("emit_latents")) c.emit_latents = detail::parse_bool("emit_latents", *v);
  if (const auto* v = get("combined")) c.combined = detail::parse_bool("combined", *v);

  if (!get("command")) throw ConfigError("no command given");
  if (c.command == Command::Simulate && c.model == FieldModel::Mixture && !(c.nu > 0.0)) {
    throw DomainViolation("nu", get("nu") ? *get("nu") : "0", "(0, inf) for the mixture model");
  }
  return c;
}

/// Parses the command line. The command may be given positionally or via
/// --command; values from --config are overridden by explicit flags.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Generalized skew-normal fields: tail dependence, moments and simulation", "gsnrf"};
  std::string positional, config_path;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> options;
  app.add_option("command_pos", positional, "Command (alternative to --command)");
  app.add_option("--config", config_path, "Flat 'key = value' configuration file");
  const std::map<std::string, std::string> help = {
      {"command", "chibar-curve | moments-surface | simulate | prop1 | validate"},
      {"seed", "64-bit unsigned seed"},
      {"out", "Output directory"},
      {"rho", "Correlation of the pair law, in (-1, 1)"},
      {"delta1", "First shape parameter"},
      {"delta2", "Second shape parameter"},
      {"zeta", "Probability clip for the u window"},
      {"gamma", "Asymmetry parameter"},
      {"nu", "Tail-weight parameter"},
      {"tau", "Nugget standard deviation"},
      {"sigma", "Scale of the Gaussian component"},
      {"mu", "Constant mean"},
      {"psi", "Matern range"},
      {"xi", "Matern smoothness: 0.5, 1.5 or 2.5"},
      {"n_reps", "Number of simulated replicates"},
      {"sites", "Site CSV with header site_id,x,y"},
      {"model", "Field model for simulate: sgrf | mixture"},
      {"root", "Square root of the correlation matrix: symmetric | cholesky"}};
  for (const auto& key : detail::config_keys()) {
    if (detail::is_flag_key(key)) continue;
    std::string flag = "--" + key;
    for (char& ch : flag) {
      if (ch == '_') ch = '-';
    }
    options[key] = app.add_option(flag, flag_values[key], help.at(key));
  }
  bool quick = false, emit_plots = false, emit_latents = false, combined = false;
  auto* f_quick = app.add_flag("--quick", quick, "Reduced validation battery");
  auto* f_plots = app.add_flag("--emit-plots", emit_plots, "Also write SVG plots");
  auto* f_latents = app.add_flag("--emit-latents", emit_latents, "Write latent panels");
  auto* f_combined = app.add_flag("--combined", combined, "One long-format curve CSV");

  app.allow_extras();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  if (const auto extras = app.remaining(); !extras.empty()) {
    std::string key = extras.front();
    key.erase(0, key.find_first_not_of('-'));
    throw UnknownKey(detail::normalize_key(key.substr(0, key.find('='))));
  }

  std::map<std::string, std::string> kv;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    kv = parse_config_text(buf.str());
  }
  if (!positional.empty()) kv["command"] = positional;
  for (const auto& [key, opt] : options) {
    if (opt->count() > 0) kv[key] = flag_values[key];
  }
  if (f_quick->count() > 0) kv["quick"] = quick ? "true" : "false";
  if (f_plots->count() > 0) kv["emit_plots"] = emit_plots ? "true" : "false";
  if (f_latents->count() > 0) kv["emit_latents"] = emit_latents ? "true" : "false";
  if (f_combined->count() > 0) kv["combined"] = combined ? "true" : "false";
  return build_config(kv);
}

inline RunConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

}  // namespace gsnrf
