// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cvqkd {

/// Quadrature covariance matrix of an n-mode bosonic state.
///
/// Ordering is (x1, p1, ..., xn, pn) in shot-noise units, so the vacuum is the
/// identity. Construction checks symmetry (relative 1e-12); physicality is a
/// separate, more expensive query.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  static CovarianceMatrix vacuum(std::size_t modes);

  std::size_t modes() const { return static_cast<std::size_t>(entries_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

  /// Smallest symplectic eigenvalue is at least 1 - tol.
  bool is_physical(double tol = 1e-9) const;

 private:
  Eigen::MatrixXd entries_;
};

enum class Quadrature { x, p };

/// Principal branch of the Lambert W function, w * exp(w) = x, x >= -1/e.
double lambert_w0(double x);

/// W0(exp(log_x)), usable when exp(log_x) would overflow.
double lambert_w0_exp(double log_x);

/// Modified Bessel function of the first kind, order 0 or 1, x >= 0.
double bessel_i(int order, double x);

/// exp(-x) * I_order(x); finite for every x >= 0.
double bessel_i_scaled(int order, double x);

/// Symplectic spectrum of `gamma`, sorted descending.
///
/// Obtained as the moduli of the eigenvalues of Omega*gamma, which come in
/// +-i*nu pairs. Throws NumericalError if the spectrum does not pair up to
/// 1e-8 (non-symmetric or indefinite input).
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& gamma);

/// Covariance matrix of the remaining modes after an ideal homodyne
/// measurement of `quadrature` on `measured_mode` (zero-based).
CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& gamma, std::size_t measured_mode,
                                       Quadrature quadrature);

/// Von Neumann entropy in bits of a thermal mode with symplectic eigenvalue x.
/// Values in [1 - 1e-9, 1] are treated as 1.
double thermal_entropy(double x);

}  // namespace cvqkd
