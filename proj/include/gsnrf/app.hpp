#pragma once

#include <exception>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "gsnrf/commands.hpp"
#include "gsnrf/config.hpp"
#include "gsnrf/validation.hpp"
#include "json.hpp"

namespace gsnrf {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

/// Single-line JSON error record written to stderr on failure.
inline std::string error_record(const std::exception& e, const char* kind) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = e.what();
  if (const auto* dv = dynamic_cast<const DomainViolation*>(&e)) {
    j["key"] = dv->key();
    j["value"] = dv->value();
    j["allowed"] = dv->allowed();
  } else if (const auto* uk = dynamic_cast<const UnknownKey*>(&e)) {
    j["key"] = uk->key();
  }
  return j.dump();
}

/// Executes a validated configuration. Written files are listed on `out`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::string> files;
    switch (c.command) {
      case Command::ChibarCurve: files = run_chibar_curve(c); break;
      case Command::MomentsSurface: files = run_moments_surface(c); break;
      case Command::Simulate: files = run_simulate(c); break;
      case Command::Prop1: run_prop1(c, out); return kExitOk;
      case Command::Validate: {
        ValidationOptions o;
        o.quick = c.quick;
        o.seed = c.seed;
        const auto results = run_acceptance(o, &out);
        std::size_t failed = 0;
        for (const auto& r : results) failed += r.passed ? 0 : 1;
        out << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << (c.quick ? " (quick mode)" : "") << '\n';
        return failed == 0 ? kExitOk : kExitFailure;
      }
    }
    for (const auto& f : files) out << "wrote " << f << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_record(e, e.kind()) << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << error_record(e, e.kind()) << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << error_record(e, "InternalError") << '\n';
    return kExitFailure;
  }
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  RunConfig c;
  try {
    c = parse_config(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_record(e, e.kind()) << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << error_record(e, "ConfigError") << '\n';
    return kExitConfig;
  }
  return run(c, out, err);
}

}  // namespace gsnrf
