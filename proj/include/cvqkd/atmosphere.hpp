// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cvqkd {

enum class LinkDirection { uplink, downlink };

/// Vertical ground-satellite optical link. Lengths in meters.
struct TurbulenceScenario {
  double wavelength = 809e-9;
  double beam_waist = 0.02;       ///< W0
  double aperture_radius = 0.04;  ///< r0
  double distance = 20e3;         ///< L
  double ground_altitude = 0.0;   ///< h0
  double wind_speed = 21.0;       ///< r.m.s. wind speed, m/s
  double cn2_ground = 1.7e-14;    ///< C_n^2 at sea level, m^(-2/3)
  LinkDirection link = LinkDirection::uplink;

  double wavenumber() const;
  /// k W0^2 / (2 L).
  double fresnel_parameter() const;
  /// Scintillation saturation coefficient: 0.56 uplink, 1.11 downlink.
  double zeta() const;

  /// Throws DomainError unless every length is positive.
  void validate() const;
};

/// First and second moments of the centroid position and of the log
/// semi-axis parameters theta_i = ln(W_i^2 / W0^2).
struct BeamStatistics {
  double mean_theta = 0.0;
  double var_theta = 0.0;
  double cov_theta = 0.0;
  double var_centroid = 0.0;  ///< m^2, shared by x and y
  double sigma_I2 = 0.0;
  double omega = 0.0;
  double sigma_R2 = 0.0;  ///< 0 when the scintillation index was given directly
};

/// Hufnagel-Valley refractive-index structure constant at altitude h (m).
double cn2_profile(double h, const TurbulenceScenario& scenario);

/// Rytov variance of the vertical path [h0, h0 + L].
double rytov_variance(const TurbulenceScenario& scenario);

double scintillation_index(double sigma_R2, LinkDirection link);

/// Beam-parameter statistics for a given scintillation index. Throws
/// NumericalError if the theta covariance would not be positive semidefinite.
BeamStatistics beam_statistics(const TurbulenceScenario& scenario, double sigma_I2);

/// beam_statistics() fed by the full profile -> Rytov -> scintillation chain.
BeamStatistics beam_statistics(const TurbulenceScenario& scenario);

}  // namespace cvqkd
