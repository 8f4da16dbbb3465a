// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvqkd/errors.hpp"
#include "cvqkd/specfun.hpp"

namespace cvqkd {

namespace {

// Below this u the direct formulas lose digits to cancellation; the series
// truncation error there is below 1e-13.
constexpr double kSeriesLimit = 1e-2;

// 1 - exp(-u) I0(u)
double aperture_deficit(double u) { return 1.0 - bessel_i_scaled(0, u); }

// (d / (r0 R(W)))^lambda(W) with u = r0^2 W^2 and ratio = d / r0, written so
// that R -> inf at u -> 0 never materializes.
double profile_exponent(double ratio, double u) {
  return shape_log_ratio(u) * std::pow(ratio, shape_exponent(u));
}

}  // namespace

BeamSample BeamSample::circular(double x, double y, double radius, double beam_waist) {
  const double theta = 2.0 * std::log(radius / beam_waist);
  return BeamSample{x, y, theta, theta, 0.0, beam_waist};
}

double shape_log_ratio(double u) {
  if (!(u >= 0.0)) throw DomainError("shape_log_ratio: negative argument");
  if (u < kSeriesLimit) {
    const double u2 = u * u;
    return u * (0.5 - u / 8.0 + u2 / 96.0 + u * u2 / 384.0 - u2 * u2 / 1440.0 -
                u2 * u2 * u / 15360.0 + 359.0 * u2 * u2 * u2 / 7741440.0);
  }
  return std::log(-2.0 * std::expm1(-0.5 * u) / aperture_deficit(u));
}

double shape_exponent(double u) {
  if (!(u >= 0.0)) throw DomainError("shape_exponent: negative argument");
  if (u < kSeriesLimit) {
    const double u3 = u * u * u;
    return 2.0 + u3 / 96.0 - 7.0 * u3 * u * u / 7680.0;
  }
  return 2.0 * u * bessel_i_scaled(1, u) / aperture_deficit(u) / shape_log_ratio(u);
}

double shaping_lambda(double W, double r0) {
  if (!(r0 > 0.0)) throw DomainError("shaping_lambda: aperture radius must be positive");
  return shape_exponent(r0 * r0 * W * W);
}

double scaling_R(double W, double r0) {
  if (!(r0 > 0.0)) throw DomainError("scaling_R: aperture radius must be positive");
  const double u = r0 * r0 * W * W;
  if (u == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(shape_log_ratio(u), -1.0 / shape_exponent(u));
}

double effective_radius_sq(double phi_rel, double w1, double w2, double r0) {
  if (!(w1 > 0.0 && w2 > 0.0 && r0 > 0.0)) {
    throw DomainError("effective_radius_sq: radii must be positive");
  }
  const double r02 = r0 * r0;
  const double c = std::cos(phi_rel);
  const double s = std::sin(phi_rel);
  const double log_arg = std::log(4.0 * r02 / (w1 * w2)) + r02 / (w1 * w1) * (1.0 + 2.0 * c * c) +
                         r02 / (w2 * w2) * (1.0 + 2.0 * s * s);
  double w;
  try {
    w = lambert_w0_exp(log_arg);
  } catch (const DomainError& e) {
    throw NumericalError(std::string("effective_radius_sq: ") + e.what());
  }
  return 4.0 * r02 / w;
}

double max_transmissivity(double w1, double w2, double r0) {
  if (!(w1 > 0.0 && w2 > 0.0 && r0 > 0.0)) {
    throw DomainError("max_transmissivity: radii must be positive");
  }
  const double r02 = r0 * r0;
  const double a = std::abs(r02 * (1.0 / (w1 * w1) - 1.0 / (w2 * w2)));
  const double b = r02 * (1.0 / (w1 * w1) + 1.0 / (w2 * w2));
  const double centred = bessel_i_scaled(0, a) * std::exp(a - b);

  double elliptic = 0.0;
  const double inv_diff = 1.0 / w1 - 1.0 / w2;
  if (std::abs(inv_diff) >= 1e-9 / w1) {
    const double u = r02 * inv_diff * inv_diff;
    const double ratio = (w1 + w2) * (w1 + w2) / std::abs(w1 * w1 - w2 * w2);
    elliptic = -2.0 * std::expm1(-0.5 * u) * std::exp(-profile_exponent(ratio, u));
  }
  const double t0 = 1.0 - centred - elliptic;
  return std::clamp(t0, 0.0, 1.0);
}

std::optional<double> try_transmissivity(const BeamSample& sample, double r0) {
  const double w1 = sample.w1();
  const double w2 = sample.w2();
  if (!(w1 > 0.0 && w2 > 0.0 && std::isfinite(w1) && std::isfinite(w2))) return std::nullopt;

  const double t0 = max_transmissivity(w1, w2, r0);
  const double d = std::hypot(sample.x, sample.y);
  if (d == 0.0) return t0;

  const double phi_rel = sample.phi - std::atan2(sample.y, sample.x);
  const double weff2 = effective_radius_sq(phi_rel, w1, w2, r0);
  const double u = 4.0 * r0 * r0 / weff2;  // r0^2 (2 / W_eff)^2
  const double log_ratio = shape_log_ratio(u);
  if (!(log_ratio > 0.0) || !std::isfinite(log_ratio)) return std::nullopt;
  const double value = t0 * std::exp(-profile_exponent(d / r0, u));
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

double transmissivity(const BeamSample& sample, double r0) {
  const auto value = try_transmissivity(sample, r0);
  if (!value) throw NumericalError("transmissivity: shaping functions out of range for sample");
  return *value;
}

}  // namespace cvqkd
