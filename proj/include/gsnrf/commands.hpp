#pragma once

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsnrf/config.hpp"
#include "gsnrf/covariance.hpp"
#include "gsnrf/fields.hpp"
#include "gsnrf/io.hpp"
#include "gsnrf/moments.hpp"
#include "gsnrf/taildep.hpp"

namespace gsnrf {

/// Shape values crossed over (delta1, delta2) when no pair is given.
inline const std::vector<double>& delta_battery() {
  static const std::vector<double> d = {-1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  return d;
}

inline const std::vector<double>& rho_battery() {
  static const std::vector<double> r = {0.4, 0.8};
  return r;
}

namespace detail {

inline std::string root_name(RootKind r) { return r == RootKind::Symmetric ? "symmetric" : "cholesky"; }

inline std::string xi_name(Smoothness xi) { return format_double(smoothness_value(xi)); }

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

inline std::string tag(double x) {
  std::string s = format_double(x);
  for (char& c : s) {
    if (c == '-') c = 'm';
  }
  return s;
}

template <class Writer>
std::string render(Writer&& w) {
  std::ostringstream o;
  w(o);
  return o.str();
}

}  // namespace detail

/// Figure-style chi-bar curves. Returns the written file paths in write order.
inline std::vector<std::string> run_chibar_curve(const RunConfig& c) {
  const auto dir = detail::prepare_dir(c.output_dir);
  const std::vector<double> rhos = c.rho ? std::vector<double>{*c.rho} : rho_battery();
  std::vector<std::pair<double, double>> pairs;
  if (c.delta1 || c.delta2) {
    pairs.emplace_back(c.delta1.value_or(0.0), c.delta2.value_or(0.0));
  } else {
    for (double d1 : delta_battery()) {
      for (double d2 : delta_battery()) pairs.emplace_back(d1, d2);
    }
  }
  const std::vector<double> grid = default_u_grid(c.zeta);
  auto record_for = [&](double rho, const std::string& d1, const std::string& d2) {
    return RunRecord{{"command", "chibar-curve"}, {"seed", std::to_string(c.seed)},
                     {"rho", format_double(rho)},  {"delta1", d1},
                     {"delta2", d2},               {"zeta", format_double(c.zeta)},
                     {"root", detail::root_name(c.root)},
                     {"grid_points", std::to_string(grid.size())}};
  };

  std::vector<std::string> files;
  std::vector<CurveSeries> all, refs;
  for (double rho : rhos) {
    for (const auto& [d1, d2] : pairs) {
      all.push_back(chibar_curve(TailPairParams{rho, d1, d2, c.zeta}, grid, c.root));
      if (!c.combined) {
        const auto path = dir / ("chibar_rho" + detail::tag(rho) + "_d1_" + detail::tag(d1) +
                                 "_d2_" + detail::tag(d2) + ".csv");
        write_file(path.string(), detail::render([&](std::ostream& o) {
                     write_curve_csv(o, {all.back()}, record_for(rho, format_double(d1), format_double(d2)));
                   }));
        files.push_back(path.string());
      }
    }
    refs.push_back(normal_reference_curve(rho, grid, c.zeta));
    const auto path = dir / ("normal_rho" + detail::tag(rho) + ".csv");
    write_file(path.string(), detail::render([&](std::ostream& o) {
                 write_curve_csv(o, {refs.back()}, record_for(rho, "0", "0"));
               }));
    files.push_back(path.string());
  }
  if (c.combined) {
    const auto path = dir / "chibar_curves.csv";
    write_file(path.string(), detail::render([&](std::ostream& o) {
                 write_curve_csv(o, all, record_for(rhos.size() == 1 ? rhos[0] : 0.0, "battery", "battery"));
               }));
    files.push_back(path.string());
  }
  if (c.emit_plots) {
    const auto path = dir / "chibar_curves.svg";
    write_file(path.string(), curve_plot(all, refs));
    files.push_back(path.string());
  }
  return files;
}

inline std::vector<std::string> run_moments_surface(const RunConfig& c) {
  const auto dir = detail::prepare_dir(c.output_dir);
  const std::vector<double> gammas = c.has("gamma") ? std::vector<double>{c.gamma} : default_gamma_grid();
  const std::vector<double> nus = c.has("nu") ? std::vector<double>{c.nu} : default_nu_grid();
  const auto rows = moment_surface(gammas, nus, c.tau, c.sigma);
  const RunRecord record{{"command", "moments-surface"},
                         {"seed", std::to_string(c.seed)},
                         {"gamma", c.has("gamma") ? format_double(c.gamma) : "-5:0.1:5"},
                         {"nu", c.has("nu") ? format_double(c.nu) : "0,0.25,0.5,1,2"},
                         {"tau", format_double(c.tau)},
                         {"sigma", format_double(c.sigma)}};
  std::vector<std::string> files;
  const auto path = dir / "moments_surface.csv";
  write_file(path.string(), detail::render([&](std::ostream& o) { write_moment_csv(o, rows, record); }));
  files.push_back(path.string());
  if (c.emit_plots) {
    const auto svg_path = dir / "moments_surface.svg";
    write_file(svg_path.string(), moment_plot(rows));
    files.push_back(svg_path.string());
  }
  return files;
}

inline SiteSet config_sites(const RunConfig& c) {
  return c.sites.empty() ? SiteSet::grid(5, 5, 1.0) : read_sites_csv(c.sites);
}

inline SimGrid simulate_from_config(const RunConfig& c, const SiteSet& sites) {
  const RngStream rng(c.seed);
  if (c.model == FieldModel::Sgrf) {
    SgrfModel m{c.mu, c.sigma * c.sigma, c.gamma, c.tau * c.tau, c.matern, c.matern};
    return simulate_sgrf(m, sites, c.n_reps, rng, c.emit_latents);
  }
  MixtureModel m;
  m.beta = Vector::Constant(1, c.mu);
  m.sigma = c.sigma;
  m.gamma = c.gamma;
  m.tau2 = c.tau * c.tau;
  m.nu = c.nu;
  m.matern = c.matern;
  return simulate_mixture(m, sites, c.n_reps, rng, c.emit_latents);
}

inline std::vector<std::string> run_simulate(const RunConfig& c) {
  const auto dir = detail::prepare_dir(c.output_dir);
  const SiteSet sites = config_sites(c);
  const SimGrid grid = simulate_from_config(c, sites);
  const std::string model = c.model == FieldModel::Sgrf ? "sgrf" : "mixture";
  RunRecord record{{"command", "simulate"},
                   {"seed", std::to_string(c.seed)},
                   {"model", model},
                   {"mu", format_double(c.mu)},
                   {"sigma", format_double(c.sigma)},
                   {"gamma", format_double(c.gamma)},
                   {"tau", format_double(c.tau)}};
  if (c.model == FieldModel::Mixture) record.emplace_back("nu", format_double(c.nu));
  record.emplace_back("psi", format_double(c.matern.psi));
  record.emplace_back("xi", detail::xi_name(c.matern.xi));
  record.emplace_back("n_reps", std::to_string(c.n_reps));
  record.emplace_back("n_sites", std::to_string(sites.size()));
  record.emplace_back("jitter", format_double(grid.jitter));
  const auto path = dir / ("simulate_" + model + ".csv");
  write_file(path.string(), detail::render([&](std::ostream& o) { write_simgrid_csv(o, grid, record); }));
  return {path.string()};
}

/// Prints the threshold and classifications; writes no files.
inline void run_prop1(const RunConfig& c, std::ostream& out) {
  if (!c.rho) throw ConfigError("prop1 requires rho");
  const double rho = *c.rho;
  const double d2 = c.delta2.value_or(0.0);
  const Prop1Threshold t = prop1_threshold(rho, d2);
  out << "threshold(rho=" << format_double(rho) << ", delta2=" << format_double(d2)
      << ") = " << svg::fixed(t.value, 7) << " (" << format_double(t.value) << ")"
      << (t.radicand_negative ? " (radicand negative)" : "")
      << '\n';
  out << "cases:\n"
      << "  (a) 0 <= delta1 <= delta2, or delta1 < 0\n"
      << "  (b) 0 <= delta2 < delta1 < threshold\n"
      << "  indeterminate: delta1 >= threshold with 0 <= delta2 < delta1, or delta2 < 0 <= delta1\n";
  std::vector<double> d1s = delta_battery();
  if (c.delta1) d1s = {*c.delta1};
  if (!c.delta1 && t.value > 0 && std::isfinite(t.value)) {
    d1s.push_back(t.value);
    std::sort(d1s.begin(), d1s.end());
  }
  out << "delta1,delta2,class\n";
  for (double d1 : d1s) {
    out << format_double(d1) << ',' << format_double(d2) << ',' << to_string(classify_prop1(rho, d1, d2))
        << '\n';
  }
}

}  // namespace gsnrf
