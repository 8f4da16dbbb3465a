// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cvqkd/errors.hpp"

namespace cvqkd {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kBesselSeriesLimit = 15.0;

double halley_w0(double x, double w) {
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(w))) return w;
  }
  throw NumericalError("lambert_w0: Halley iteration did not converge");
}

// Sum of (x/2)^(2m+order) / (m! (m+order)!).
double bessel_series(int order, double x) {
  const double q = 0.25 * x * x;
  double term = order == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + order));
    sum += term;
    if (term <= std::numeric_limits<double>::epsilon() * sum) break;
  }
  return sum;
}

// Hankel expansion of exp(-x) I_order(x), truncated at its smallest term.
double bessel_asymptotic_scaled(int order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

Eigen::MatrixXd symplectic_form(Eigen::Index modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (Eigen::Index k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0) {
    throw DomainError("CovarianceMatrix: need a non-empty 2n x 2n matrix");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    throw DomainError("CovarianceMatrix: matrix is not symmetric");
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t modes) {
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  return CovarianceMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

bool CovarianceMatrix::is_physical(double tol) const {
  try {
    const auto nu = symplectic_eigenvalues(*this);
    return nu.back() >= 1.0 - tol;
  } catch (const NumericalError&) {
    return false;
  }
}

double lambert_w0(double x) {
  if (std::isnan(x) || x < -kInvE) {
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x == -kInvE) return -1.0;

  double w;
  const double branch = 2.0 * (std::numbers::e * x + 1.0);
  if (branch < 0.5) {
    const double p = std::sqrt(std::max(branch, 0.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = 0.5 * std::log1p(x) + 0.25 * x / (1.0 + x);
    w = std::max(w, -0.9);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  if (std::isinf(x)) return x;
  return halley_w0(x, w);
}

double lambert_w0_exp(double log_x) {
  if (log_x < 20.0) return lambert_w0(std::exp(log_x));
  // Newton on w + ln w = log_x.
  double w = log_x - std::log(log_x);
  for (int iter = 0; iter < 50; ++iter) {
    const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * w) return w;
  }
  throw NumericalError("lambert_w0_exp: Newton iteration did not converge");
}

double bessel_i(int order, double x) {
  if (order != 0 && order != 1) throw DomainError("bessel_i: only orders 0 and 1");
  if (!(x >= 0.0)) throw DomainError("bessel_i: negative argument");
  if (x < kBesselSeriesLimit) return bessel_series(order, x);
  // exp(x) overflows near 709.78; split so the product stays representable.
  const double half = std::exp(0.5 * x);
  return bessel_asymptotic_scaled(order, x) * half * half;
}

double bessel_i_scaled(int order, double x) {
  if (order != 0 && order != 1) throw DomainError("bessel_i_scaled: only orders 0 and 1");
  if (!(x >= 0.0)) throw DomainError("bessel_i_scaled: negative argument");
  if (x < kBesselSeriesLimit) return std::exp(-x) * bessel_series(order, x);
  return bessel_asymptotic_scaled(order, x);
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& gamma) {
  const auto n = static_cast<Eigen::Index>(gamma.modes());
  const Eigen::MatrixXd product = symplectic_form(n) * gamma.matrix();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(product, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symplectic_eigenvalues: eigen-decomposition failed");
  }
  const Eigen::VectorXcd spectrum = solver.eigenvalues();

  std::vector<double> positive;
  std::vector<double> negative;
  const double scale = std::max(1.0, gamma.matrix().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const std::complex<double> ev = spectrum(i);
    if (std::abs(ev.real()) > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "symplectic_eigenvalues: eigenvalue " << ev.real() << (ev.imag() < 0 ? "" : "+")
          << ev.imag() << "i of Omega*gamma is not purely imaginary";
      throw NumericalError(msg.str());
    }
    (ev.imag() >= 0.0 ? positive : negative).push_back(std::abs(ev.imag()));
  }
  // A degenerate pair can split with both halves landing on the same side of
  // zero only when nu ~ 0, which is already unphysical.
  if (positive.size() != negative.size()) {
    throw NumericalError("symplectic_eigenvalues: spectrum does not pair up");
  }
  std::sort(positive.begin(), positive.end(), std::greater<>());
  std::sort(negative.begin(), negative.end(), std::greater<>());
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (std::abs(positive[i] - negative[i]) > 1e-8 * scale) {
      throw NumericalError("symplectic_eigenvalues: unmatched +-i*nu pair");
    }
    positive[i] = 0.5 * (positive[i] + negative[i]);
  }
  return positive;
}

CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& gamma, std::size_t measured_mode,
                                       Quadrature quadrature) {
  const std::size_t n = gamma.modes();
  if (n < 2) throw DomainError("condition_on_homodyne: need at least two modes");
  if (measured_mode >= n) throw DomainError("condition_on_homodyne: mode index out of range");

  const auto rest_dim = static_cast<Eigen::Index>(2 * (n - 1));
  std::vector<Eigen::Index> rest;
  rest.reserve(static_cast<std::size_t>(rest_dim));
  for (std::size_t k = 0; k < n; ++k) {
    if (k == measured_mode) continue;
    rest.push_back(static_cast<Eigen::Index>(2 * k));
    rest.push_back(static_cast<Eigen::Index>(2 * k + 1));
  }
  const auto q = static_cast<Eigen::Index>(2 * measured_mode + (quadrature == Quadrature::x ? 0 : 1));
  const double variance = gamma(q, q);
  if (!(variance > 1e-12)) {
    throw NumericalError("condition_on_homodyne: measured quadrature variance is degenerate");
  }

  Eigen::MatrixXd out(rest_dim, rest_dim);
  for (Eigen::Index i = 0; i < rest_dim; ++i) {
    for (Eigen::Index j = 0; j < rest_dim; ++j) {
      out(i, j) = gamma(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(j)]) -
                  gamma(rest[static_cast<std::size_t>(i)], q) *
                      gamma(rest[static_cast<std::size_t>(j)], q) / variance;
    }
  }
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

double thermal_entropy(double x) {
  if (std::isnan(x) || x < 1.0 - 1e-9) throw DomainError("thermal_entropy: argument below 1");
  if (x <= 1.0) return 0.0;
  const double plus = 0.5 * (x + 1.0);
  const double minus = 0.5 * (x - 1.0);
  return plus * std::log2(plus) - minus * std::log2(minus);
}

}  // namespace cvqkd
