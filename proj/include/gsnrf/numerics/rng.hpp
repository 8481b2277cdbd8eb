#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "gsnrf/errors.hpp"
#include "gsnrf/numerics/linalg.hpp"

namespace gsnrf {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// xoshiro256** stream (period 2^256 - 1) seeded through splitmix64.
///
/// Splitting rule: split(k) returns the stream seeded with
/// splitmix64(seed ^ splitmix64(k)), so child streams depend only on the parent
/// seed and the index, never on how many draws the parent has made. The outer
/// hash makes nested splits non-commuting: split(a).split(b) != split(b).split(a).
/// Parallel work uses one child per work item.
///
/// Normal variates use the Marsaglia polar method; the second value of each
/// accepted pair is cached, which is part of the stream state.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = detail::splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  std::uint64_t seed() const noexcept { return seed_; }

  result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  RngStream split(std::uint64_t index) const noexcept {
    std::uint64_t k = index;
    std::uint64_t mixed = seed_ ^ detail::splitmix64(k);
    return RngStream(detail::splitmix64(mixed));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double half_normal() noexcept { return std::abs(normal()); }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n_draws x dim matrix whose rows are mean + L e with e standard normal.
inline Matrix sample_mvn(const Vector& mean, const Matrix& chol_factor, RngStream& rng,
                         Eigen::Index n_draws) {
  const Eigen::Index dim = mean.size();
  if (chol_factor.rows() != dim || chol_factor.cols() != dim) {
    throw DimensionMismatch("sample_mvn: factor is " + std::to_string(chol_factor.rows()) + "x" +
                            std::to_string(chol_factor.cols()) + " but mean has " +
                            std::to_string(dim) + " entries");
  }
  Matrix out(n_draws, dim);
  Vector e(dim);
  for (Eigen::Index r = 0; r < n_draws; ++r) {
    for (Eigen::Index j = 0; j < dim; ++j) e(j) = rng.normal();
    out.row(r) = (mean + chol_factor.triangularView<Eigen::Lower>() * e).transpose();
  }
  return out;
}

}  // namespace gsnrf
