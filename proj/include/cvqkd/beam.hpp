// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>

namespace cvqkd {

/// One realization of the elliptic beam at the receiver plane.
struct BeamSample {
  double x = 0.0;  ///< centroid, m
  double y = 0.0;
  double theta1 = 0.0;  ///< ln(W1^2 / W0^2)
  double theta2 = 0.0;
  double phi = 0.0;  ///< semi-axis orientation in [0, pi)
  double beam_waist = 0.02;

  double w1() const { return beam_waist * std::exp(0.5 * theta1); }
  double w2() const { return beam_waist * std::exp(0.5 * theta2); }

  /// Circular beam of radius `radius` centred at (x, y).
  static BeamSample circular(double x, double y, double radius, double beam_waist);
};

/// ln of the ratio inside the scaling function, as a function of u = r0^2 W^2.
/// Strictly positive for u > 0; tends to u/2 as u -> 0.
double shape_log_ratio(double u);

/// Shaping exponent as a function of u = r0^2 W^2; tends to 2 as u -> 0.
double shape_exponent(double u);

/// Shaping function lambda(W) for an aperture of radius r0.
double shaping_lambda(double W, double r0);

/// Scaling function R(W); +inf at W = 0.
double scaling_R(double W, double r0);

/// Squared effective spot radius for a relative orientation phi_rel.
double effective_radius_sq(double phi_rel, double w1, double w2, double r0);

/// Transmissivity with the centroid on the aperture axis.
double max_transmissivity(double w1, double w2, double r0);

/// Aperture transmissivity of one beam realization. Returns nullopt if the
/// shaping functions leave their valid range for this sample.
std::optional<double> try_transmissivity(const BeamSample& sample, double r0);

/// As try_transmissivity() but throws NumericalError on an invalid sample.
double transmissivity(const BeamSample& sample, double r0);

}  // namespace cvqkd
