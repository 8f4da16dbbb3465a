// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvqkd/errors.hpp"

namespace cvqkd {

double TurbulenceScenario::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

double TurbulenceScenario::fresnel_parameter() const {
  return wavenumber() * beam_waist * beam_waist / (2.0 * distance);
}

double TurbulenceScenario::zeta() const { return link == LinkDirection::uplink ? 0.56 : 1.11; }

void TurbulenceScenario::validate() const {
  if (!(wavelength > 0.0)) throw DomainError("scenario: wavelength must be positive");
  if (!(beam_waist > 0.0)) throw DomainError("scenario: beam waist must be positive");
  if (!(aperture_radius > 0.0)) throw DomainError("scenario: aperture radius must be positive");
  if (!(distance > 0.0)) throw DomainError("scenario: distance must be positive");
  if (!(ground_altitude >= 0.0)) throw DomainError("scenario: ground altitude must be >= 0");
  if (!(wind_speed >= 0.0)) throw DomainError("scenario: wind speed must be >= 0");
  if (!(cn2_ground >= 0.0)) throw DomainError("scenario: C_n^2(0) must be >= 0");
}

double cn2_profile(double h, const TurbulenceScenario& scenario) {
  if (!(h >= 0.0)) throw DomainError("cn2_profile: negative altitude");
  const double wind = scenario.wind_speed / 27.0;
  const double tropo = 0.00594 * wind * wind * std::pow(h * 1e-5, 10) * std::exp(-h / 1000.0);
  return tropo + 2.7e-16 * std::exp(-h / 1500.0) + scenario.cn2_ground * std::exp(-h / 100.0);
}

double rytov_variance(const TurbulenceScenario& scenario) {
  scenario.validate();
  const double h0 = scenario.ground_altitude;
  const double top = h0 + scenario.distance;
  // Substituting h - h0 = s^6 removes the (h - h0)^(5/6) endpoint singularity:
  // the integrand becomes 6 s^10 C_n^2(h0 + s^6).
  auto integrand = [&](double s) {
    const double s2 = s * s;
    const double s5 = s2 * s2 * s;
    return 6.0 * s5 * s5 * cn2_profile(h0 + s5 * s, scenario);
  };

  // Split at the boundary-layer and tropopause knees of the profile.
  std::vector<double> edges{0.0};
  for (double knee : {1000.0, 20e3}) {
    if (h0 + knee < top) edges.push_back(std::pow(knee, 1.0 / 6.0));
  }
  edges.push_back(std::pow(scenario.distance, 1.0 / 6.0));

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr double kTol = 1e-10;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double error = 0.0;
    double l1 = 0.0;
    const double piece = Quadrature::integrate(integrand, edges[i], edges[i + 1], 15, kTol, &error, &l1);
    if (!std::isfinite(piece) || error > 1e-8 * std::max(l1, 1e-300)) {
      std::ostringstream msg;
      msg << "rytov_variance: quadrature on [" << edges[i] << ", " << edges[i + 1]
          << "] did not converge (estimate " << piece << ", error " << error << ")";
      throw NumericalError(msg.str());
    }
    total += piece;
  }
  return 2.25 * std::pow(scenario.wavenumber(), 7.0 / 6.0) * total;
}

double scintillation_index(double sigma_R2, LinkDirection link) {
  if (!(sigma_R2 >= 0.0)) throw DomainError("scintillation_index: negative Rytov variance");
  const double zeta = link == LinkDirection::uplink ? 0.56 : 1.11;
  const double s125 = std::pow(sigma_R2, 6.0 / 5.0);  // sigma_R^(12/5)
  const double first = 0.49 * sigma_R2 / std::pow(1.0 + zeta * s125, 7.0 / 6.0);
  const double second = 0.51 * sigma_R2 / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
  return std::expm1(first + second);
}

BeamStatistics beam_statistics(const TurbulenceScenario& scenario, double sigma_I2) {
  scenario.validate();
  if (!(sigma_I2 >= 0.0)) throw DomainError("beam_statistics: negative scintillation index");
  const double omega = scenario.fresnel_parameter();
  const double s = sigma_I2 * std::pow(omega, 5.0 / 6.0);
  const double broadening = 1.0 + 2.96 * s;
  const double b2 = broadening * broadening;

  BeamStatistics stats;
  stats.sigma_I2 = sigma_I2;
  stats.omega = omega;
  stats.mean_theta = std::log(b2 / (omega * omega * std::sqrt(b2 + 1.2 * s)));
  stats.var_theta = std::log1p(1.2 * s / b2);
  stats.cov_theta = std::log1p(-0.8 * s / b2);
  stats.var_centroid =
      0.33 * scenario.beam_waist * scenario.beam_waist * sigma_I2 * std::pow(omega, -7.0 / 6.0);

  if (std::abs(stats.cov_theta) > stats.var_theta) {
    std::ostringstream msg;
    msg << "beam_statistics: theta covariance " << stats.cov_theta << " exceeds variance "
        << stats.var_theta;
    throw NumericalError(msg.str());
  }
  return stats;
}

BeamStatistics beam_statistics(const TurbulenceScenario& scenario) {
  const double sigma_R2 = rytov_variance(scenario);
  auto stats = beam_statistics(scenario, scintillation_index(sigma_R2, scenario.link));
  stats.sigma_R2 = sigma_R2;
  return stats;
}

}  // namespace cvqkd
