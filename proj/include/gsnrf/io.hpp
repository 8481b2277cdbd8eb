#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsnrf/errors.hpp"
#include "gsnrf/fields.hpp"
#include "gsnrf/moments.hpp"
#include "gsnrf/taildep.hpp"

namespace gsnrf {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form; identical doubles always print identically.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// Ordered key/value record written as the leading `#` comment of every CSV.
using RunRecord = std::vector<std::pair<std::string, std::string>>;

inline void write_comment_header(std::ostream& out, const RunRecord& record) {
  out << "# gsnrf " << kVersion;
  for (const auto& [k, v] : record) out << ' ' << k << '=' << v;
  out << '\n';
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurveSeries>& series,
                            const RunRecord& record) {
  write_comment_header(out, record);
  out << "u,rho,delta1,delta2,chi_u,chibar_u,flag\n";
  for (const auto& s : series) {
    const std::string fixed = format_double(s.params.rho) + ',' + format_double(s.params.delta1) +
                              ',' + format_double(s.params.delta2) + ',';
    for (const auto& r : s.rows) {
      out << format_double(r.u) << ',' << fixed << format_double(r.chi) << ','
          << format_double(r.chibar) << ',' << to_string(r.flag) << '\n';
    }
  }
}

inline void write_moment_csv(std::ostream& out, const std::vector<MomentRow>& rows,
                             const RunRecord& record) {
  write_comment_header(out, record);
  out << "gamma,nu,tau,sigma,skewness,kurtosis\n";
  for (const auto& r : rows) {
    out << format_double(r.params.gamma) << ',' << format_double(r.params.nu) << ','
        << format_double(r.params.tau) << ',' << format_double(r.params.sigma) << ','
        << format_double(r.value.skewness) << ',' << format_double(r.value.kurtosis) << '\n';
  }
}

inline void write_simgrid_csv(std::ostream& out, const SimGrid& grid, const RunRecord& record) {
  write_comment_header(out, record);
  out << "rep,site_id,x,y,value";
  if (grid.latents) out << ",w,delta,lambda,t,epsilon";
  out << '\n';
  for (Eigen::Index r = 0; r < grid.reps.rows(); ++r) {
    for (Eigen::Index j = 0; j < grid.reps.cols(); ++j) {
      const Site& s = grid.sites[static_cast<std::size_t>(j)];
      out << r << ',' << s.id << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
          << format_double(grid.reps(r, j));
      if (grid.latents) {
        const LatentPanels& l = *grid.latents;
        out << ',' << format_double(l.w(r, j)) << ',' << format_double(l.delta(r, j)) << ','
            << format_double(l.lambda(r, j)) << ',' << format_double(l.t(r, j)) << ','
            << format_double(l.epsilon(r, j));
      }
      out << '\n';
    }
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
}

// Minimal SVG line charts. Plots are derived views of the CSVs.
namespace svg {

struct Line {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

struct Panel {
  std::string title, x_label, y_label;
  std::vector<Line> lines;
  double x_min = 0, x_max = 1, y_min = -1, y_max = 1;
};

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

inline std::string fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void render_panel(std::ostringstream& o, const Panel& p, double ox, double oy, double w,
                         double h) {
  const double left = ox + 60, right = ox + w - 130, top = oy + 30, bottom = oy + h - 45;
  auto sx = [&](double x) { return left + (x - p.x_min) / (p.x_max - p.x_min) * (right - left); };
  auto sy = [&](double y) { return bottom - (y - p.y_min) / (p.y_max - p.y_min) * (bottom - top); };
  o << "<text x=\"" << fixed((left + right) / 2) << "\" y=\"" << fixed(oy + 18)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << p.title << "</text>\n";
  o << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\""
    << fixed(right - left) << "\" height=\"" << fixed(bottom - top)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = p.x_min + (p.x_max - p.x_min) * i / 4.0;
    const double yv = p.y_min + (p.y_max - p.y_min) * i / 4.0;
    o << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(bottom + 15)
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fixed(xv) << "</text>\n";
    o << "<text x=\"" << fixed(left - 5) << "\" y=\"" << fixed(sy(yv) + 3)
      << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(yv) << "</text>\n";
  }
  o << "<text x=\"" << fixed((left + right) / 2) << "\" y=\"" << fixed(bottom + 32)
    << "\" text-anchor=\"middle\" font-size=\"11\">" << p.x_label << "</text>\n";
  o << "<text x=\"" << fixed(ox + 14) << "\" y=\"" << fixed((top + bottom) / 2)
    << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " << fixed(ox + 14)
    << ' ' << fixed((top + bottom) / 2) << ")\">" << p.y_label << "</text>\n";
  for (std::size_t k = 0; k < p.lines.size(); ++k) {
    const Line& line = p.lines[k];
    const char* colour = line.dashed ? "black" : kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\""
      << (line.dashed ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < line.x.size(); ++i) {
      if (!std::isfinite(line.y[i])) continue;
      const double yc = std::clamp(line.y[i], p.y_min, p.y_max);
      o << fixed(sx(line.x[i])) << ',' << fixed(sy(yc)) << ' ';
    }
    o << "\"/>\n";
    const double ly = top + 12 + 14 * static_cast<double>(k);
    o << "<line x1=\"" << fixed(right + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
      << fixed(right + 30) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << colour << "\""
      << (line.dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
    o << "<text x=\"" << fixed(right + 34) << "\" y=\"" << fixed(ly) << "\" font-size=\"10\">"
      << line.label << "</text>\n";
  }
}

/// Panels laid out in a grid with `columns` per row.
inline std::string render(const std::vector<Panel>& panels, int columns = 2) {
  const double w = 460, h = 320;
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w * columns, 0)
    << "\" height=\"" << fixed(h * rows, 0) << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(o, panels[i], w * static_cast<double>(i % columns),
                 h * static_cast<double>(i / columns), w, h);
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace svg

/// One chi-bar panel per (rho, delta1) with a line per delta2, one row of
/// panels per rho. The normal reference for that rho is dashed in every panel.
inline std::string curve_plot(const std::vector<CurveSeries>& series,
                              const std::vector<CurveSeries>& references) {
  auto line_of = [](const CurveSeries& s, std::string label, bool dashed) {
    svg::Line l{std::move(label), {}, {}, dashed};
    for (const auto& r : s.rows) {
      l.x.push_back(r.u);
      l.y.push_back(r.chibar);
    }
    return l;
  };
  std::map<std::pair<double, double>, svg::Panel> panels_by_key;
  std::map<double, int> per_rho;
  for (const auto& s : series) {
    auto [it, fresh] = panels_by_key.try_emplace({s.params.rho, s.params.delta1});
    if (fresh) {
      it->second.title = "rho = " + format_double(s.params.rho) +
                         ", delta1 = " + format_double(s.params.delta1);
      it->second.x_label = "u";
      it->second.y_label = "chibar(u)";
      ++per_rho[s.params.rho];
    }
    it->second.lines.push_back(
        line_of(s, "delta2=" + format_double(s.params.delta2), false));
  }
  int columns = 1;
  for (const auto& [rho, n] : per_rho) columns = std::max(columns, n);
  std::vector<svg::Panel> panels;
  for (auto& [key, panel] : panels_by_key) {
    for (const auto& ref : references) {
      if (ref.params.rho == key.first) panel.lines.push_back(line_of(ref, "normal", true));
    }
    panels.push_back(std::move(panel));
  }
  if (panels.empty()) {
    for (const auto& ref : references) {
      svg::Panel p{"rho = " + format_double(ref.params.rho), "u", "chibar(u)", {}};
      p.lines.push_back(line_of(ref, "normal", true));
      panels.push_back(std::move(p));
    }
  }
  return svg::render(panels, columns);
}

/// Skewness and kurtosis against gamma, one line per nu.
inline std::string moment_plot(const std::vector<MomentRow>& rows) {
  std::map<double, std::pair<svg::Line, svg::Line>> by_nu;
  double g_min = 0, g_max = 0, s_min = 0, s_max = 0, k_min = 3, k_max = 3;
  for (const auto& r : rows) {
    auto& [sl, kl] = by_nu[r.params.nu];
    sl.label = kl.label = "nu=" + format_double(r.params.nu);
    sl.x.push_back(r.params.gamma);
    sl.y.push_back(r.value.skewness);
    kl.x.push_back(r.params.gamma);
    kl.y.push_back(r.value.kurtosis);
    g_min = std::min(g_min, r.params.gamma);
    g_max = std::max(g_max, r.params.gamma);
    s_min = std::min(s_min, r.value.skewness);
    s_max = std::max(s_max, r.value.skewness);
    k_min = std::min(k_min, r.value.kurtosis);
    k_max = std::max(k_max, r.value.kurtosis);
  }
  if (g_max == g_min) g_max = g_min + 1;
  if (s_max == s_min) s_max = s_min + 1;
  if (k_max == k_min) k_max = k_min + 1;
  svg::Panel skew{"skewness S(Y)", "gamma", "S", {}, g_min, g_max, s_min, s_max};
  svg::Panel kurt{"kurtosis K(Y)", "gamma", "K", {}, g_min, g_max, k_min, k_max};
  for (auto& [nu, lines] : by_nu) {
    skew.lines.push_back(lines.first);
    kurt.lines.push_back(lines.second);
  }
  return svg::render({skew, kurt});
}

}  // namespace gsnrf
