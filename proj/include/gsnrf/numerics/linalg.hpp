#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "gsnrf/errors.hpp"

namespace gsnrf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lower-triangular L with L * L^T = m. Throws NotPositiveDefinite on the first
/// pivot that is not strictly positive.
inline Matrix cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("cholesky: matrix is not square");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("cholesky: matrix is not symmetric");
  }
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is " +
                                std::to_string(pivot));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

/// Symmetric positive-definite matrix together with its Cholesky factor.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m) : m_(std::move(m)), chol_(cholesky(m_)) {}

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  const Matrix& chol() const noexcept { return chol_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
  Matrix chol_;
};

/// ||L L^T - m||_F / ||m||_F
inline double reconstruction_error(const Matrix& l, const Matrix& m) {
  return (l * l.transpose() - m).norm() / m.norm();
}

/// Principal (symmetric, positive-definite) square root of a 2x2 SPD matrix,
/// via sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)).
inline Matrix sym_sqrt_2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw DimensionMismatch("sym_sqrt_2x2: need a 2x2 matrix");
  cholesky(m);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double s = std::sqrt(det);
  const double t = std::sqrt(m(0, 0) + m(1, 1) + 2.0 * s);
  Matrix r = (m + s * Matrix::Identity(2, 2)) / t;
  r(1, 0) = r(0, 1);
  return r;
}

/// 2x2 correlation matrix [[1, rho], [rho, 1]].
inline Matrix correlation_2x2(double rho) {
  Matrix g(2, 2);
  g << 1.0, rho, rho, 1.0;
  return g;
}

}  // namespace gsnrf
