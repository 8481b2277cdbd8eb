#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "gsnrf/errors.hpp"

namespace gsnrf {

/// A fixed quadrature rule mapped onto [lo, hi].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double apply(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// N-point Gauss-Legendre rule on [lo, hi]; N must be even.
template <unsigned N>
QuadratureRule gauss_legendre(double lo, double hi) {
  static_assert(N >= 2 && N % 2 == 0, "gauss_legendre: use an even node count");
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.reserve(N);
  rule.weights.reserve(N);
  for (std::size_t i = x.size(); i-- > 0;) {
    rule.nodes.push_back(mid - half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(mid + half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
  return rule;
}

/// Composite rule: `panels` equal panels of an N-point Gauss-Legendre rule.
template <unsigned N>
QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels) {
  QuadratureRule out;
  out.lo = lo;
  out.hi = hi;
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const auto piece = gauss_legendre<N>(lo + width * p, lo + width * (p + 1));
    out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return out;
}

struct IntegralResult {
  double value;
  double error;
};

namespace detail {

struct KronrodPanel {
  double a, b, value, error;
};

// Gauss-Kronrod 7/15 on [a, b]; error is the QUADPACK-style |K15 - G7| estimate.
template <class F>
KronrodPanel kronrod15(F& f, double a, double b) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double fc = f(mid);
  double resk = fc * wgk[7];
  double resg = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double f1 = f(mid - dx);
    const double f2 = f(mid + dx);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  resk *= half;
  resg *= half;
  const double err = std::max(std::abs(resk - resg), 50.0 * 2.2e-16 * std::abs(resk));
  return {a, b, resk, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError after max_panels.
template <class F>
IntegralResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                                  double abs_tol = 0.0, std::size_t max_panels = 2000) {
  if (a == b) return {0.0, 0.0};
  std::vector<detail::KronrodPanel> panels;
  panels.push_back(detail::kronrod15(f, a, b));
  double value = panels.front().value;
  double error = panels.front().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (panels.size() >= max_panels || !std::isfinite(value)) {
      throw QuadratureError("integrate_adaptive: tolerance not met on [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]",
                            error);
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const detail::KronrodPanel old = panels[worst];
    const double m = 0.5 * (old.a + old.b);
    panels[worst] = detail::kronrod15(f, old.a, m);
    panels.push_back(detail::kronrod15(f, m, old.b));
    value = 0.0;
    error = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
    }
  }
  return {value, error};
}

}  // namespace gsnrf
