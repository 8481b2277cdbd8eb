#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/linalg.hpp"

namespace gsnrf {

/// Matérn smoothness values with closed forms.
enum class Smoothness { Half, ThreeHalves, FiveHalves };

inline double smoothness_value(Smoothness xi) noexcept {
  switch (xi) {
    case Smoothness::Half: return 0.5;
    case Smoothness::ThreeHalves: return 1.5;
    case Smoothness::FiveHalves: return 2.5;
  }
  return 1.5;
}

inline Smoothness smoothness_from(double xi) {
  if (xi == 0.5) return Smoothness::Half;
  if (xi == 1.5) return Smoothness::ThreeHalves;
  if (xi == 2.5) return Smoothness::FiveHalves;
  throw DomainError("Matern smoothness must be one of {0.5, 1.5, 2.5}, got " + std::to_string(xi));
}

struct MaternParams {
  double psi = 1.0;
  Smoothness xi = Smoothness::ThreeHalves;

  void validate() const {
    if (!(psi > 0.0) || !std::isfinite(psi)) {
      throw DomainError("Matern range psi must be positive, got " + std::to_string(psi));
    }
  }
};

struct Site {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

/// Ordered planar site list.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Site> sites) : sites_(std::move(sites)) {
    for (const auto& s : sites_) {
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
        throw DomainError("site '" + s.id + "' has non-finite coordinates");
      }
    }
  }

  /// Sites with ids "0".."n-1" from coordinate pairs.
  static SiteSet from_points(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Site> sites;
    sites.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sites.push_back({std::to_string(i), pts[i].first, pts[i].second});
    }
    return SiteSet(std::move(sites));
  }

  /// nx x ny lattice with the given spacing, row-major from the origin.
  static SiteSet grid(int nx, int ny, double spacing) {
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) pts.emplace_back(i * spacing, j * spacing);
    }
    return from_points(pts);
  }

  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }
  auto begin() const noexcept { return sites_.begin(); }
  auto end() const noexcept { return sites_.end(); }

  double distance(std::size_t i, std::size_t j) const {
    return std::hypot(sites_[i].x - sites_[j].x, sites_[i].y - sites_[j].y);
  }

 private:
  std::vector<Site> sites_;
};

/// Reads a site CSV with header `site_id,x,y`; row order is preserved.
inline SiteSet read_sites_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("site CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "site_id,x,y") {
    throw DomainError("site CSV header must be 'site_id,x,y', got '" + line + "'");
  }
  std::vector<Site> sites;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string id, xs, ys;
    if (!std::getline(row, id, ',') || !std::getline(row, xs, ',') || !std::getline(row, ys)) {
      throw DomainError("site CSV line " + std::to_string(lineno) + ": expected 3 fields");
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(xs, &used);
      if (used != xs.size()) throw std::invalid_argument(xs);
      const double y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument(ys);
      sites.push_back({id, x, y});
    } catch (const std::logic_error&) {
      throw DomainError("site CSV line " + std::to_string(lineno) + ": bad coordinate");
    }
  }
  return SiteSet(std::move(sites));
}

inline SiteSet read_sites_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open site CSV '" + path + "'");
  return read_sites_csv(in);
}

/// Matérn correlation at distance d for half-integer smoothness.
inline double matern_rho(double d, const MaternParams& params) {
  params.validate();
  if (!(d >= 0.0)) throw DomainError("matern_rho: distance must be >= 0, got " + std::to_string(d));
  const double t = d / params.psi;
  switch (params.xi) {
    case Smoothness::Half: return std::exp(-t);
    case Smoothness::ThreeHalves: return (1.0 + t) * std::exp(-t);
    case Smoothness::FiveHalves: return (1.0 + t + t * t / 3.0) * std::exp(-t);
  }
  return 0.0;
}

struct CorrelationMatrix {
  SpdMatrix h;
  double jitter = 0.0;  // diagonal increment actually applied
};

inline constexpr double kMaxJitter = 1e-6;

/// Correlation matrix of a site set. Jitter is added to the diagonal only if
/// the plain matrix fails to factor: 1e-12, then x10 until kMaxJitter.
inline CorrelationMatrix corr_matrix(const SiteSet& sites, const MaternParams& params) {
  if (sites.empty()) throw DomainError("corr_matrix: site set is empty");
  params.validate();
  const auto n = static_cast<Eigen::Index>(sites.size());
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = matern_rho(sites.distance(i, j), params);
      h(i, j) = r;
      h(j, i) = r;
    }
  }
  try {
    return {SpdMatrix(h), 0.0};
  } catch (const NotPositiveDefinite&) {
  }
  for (double jitter = 1e-12; jitter <= kMaxJitter * (1.0 + 1e-9); jitter *= 10.0) {
    try {
      Matrix hj = h;
      hj.diagonal().array() += jitter;
      return {SpdMatrix(std::move(hj)), jitter};
    } catch (const NotPositiveDefinite&) {
    }
  }
  throw NotPositiveDefinite("corr_matrix: factorization failed even with jitter " +
                            std::to_string(kMaxJitter));
}

}  // namespace gsnrf
