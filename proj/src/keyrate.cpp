// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cvqkd/errors.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

namespace {

constexpr double kEigenFloor = 1.0 - 1e-6;

double clamp_eigenvalue(double lambda, const char* where) {
  if (lambda < kEigenFloor) {
    std::ostringstream msg;
    msg << where << ": symplectic eigenvalue " << lambda << " below 1 (unphysical state)";
    throw NumericalError(msg.str());
  }
  return std::max(lambda, 1.0);
}

// Rows/cols ordered (xA, pA, xG, pG, xH, pH, xB3, pB3).
Eigen::MatrixXd assemble_detector_cm(const TwoModeCM& g, double eta_d, double nu) {
  const double x = g.mode_a;
  const double yp = g.mode_b;
  const double zp = g.corr;
  const double c_ag = -std::sqrt(1.0 - eta_d) * zp;
  const double c_gh = std::sqrt(eta_d * (nu * nu - 1.0));
  const double v_g = eta_d * nu + (1.0 - eta_d) * yp;
  const double ypp = eta_d * yp + (1.0 - eta_d) * nu;
  const double s_a = std::sqrt(eta_d) * zp;
  const double s_g = std::sqrt((1.0 - eta_d) * eta_d) * (nu - yp);
  const double s_h = std::sqrt((1.0 - eta_d) * (nu * nu - 1.0));

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
  auto set_block = [&m](int i, int j, double diag, bool sigma_z) {
    const double second = sigma_z ? -diag : diag;
    m(2 * i, 2 * j) = diag;
    m(2 * i + 1, 2 * j + 1) = second;
    m(2 * j, 2 * i) = diag;
    m(2 * j + 1, 2 * i + 1) = second;
  };
  set_block(0, 0, x, false);
  set_block(1, 1, v_g, false);
  set_block(2, 2, nu, false);
  set_block(3, 3, ypp, false);
  set_block(0, 1, c_ag, true);
  set_block(1, 2, c_gh, true);
  set_block(0, 3, s_a, true);
  // G and B3 share only variances through the beam splitter, so this block is
  // proportional to the identity.
  set_block(1, 3, s_g, false);
  set_block(2, 3, s_h, true);
  return m;
}

void check_transmissivity(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transmissivity must be in [0, 1]");
}

}  // namespace

void NoiseParams::validate() const {
  if (!(epsilon >= 0.0)) throw DomainError("NoiseParams: epsilon must be >= 0");
  if (!(nu >= 1.0)) throw DomainError("NoiseParams: nu must be >= 1");
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw DomainError("NoiseParams: eta_d must be in (0, 1]");
  if (!(eta_r > 0.0 && eta_r <= 1.0)) throw DomainError("NoiseParams: eta_r must be in (0, 1]");
}

TwoModeCM evolve_channel(const TwoModeCM& gamma, double transmissivity, double epsilon) {
  check_transmissivity(transmissivity);
  const double t = transmissivity;
  return {gamma.mode_a, t * (gamma.mode_b + epsilon) + (1.0 - t), std::sqrt(t) * gamma.corr};
}

std::pair<double, double> two_mode_symplectic_eigenvalues(const TwoModeCM& gamma) {
  const double x = gamma.mode_a;
  const double y = gamma.mode_b;
  const double sum = x + y;
  const double root = std::sqrt(std::max(sum * sum - 4.0 * gamma.corr * gamma.corr, 0.0));
  const double l1 = 0.5 * (root + (y - x));
  const double l2 = 0.5 * (root - (y - x));
  return {std::max(l1, l2), std::min(l1, l2)};
}

CovarianceMatrix detector_cm(const TwoModeCM& gamma_ab2, double eta_d, double nu) {
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw DomainError("detector_cm: eta_d must be in (0, 1]");
  if (!(nu >= 1.0)) throw DomainError("detector_cm: nu must be >= 1");
  CovarianceMatrix out(assemble_detector_cm(gamma_ab2, eta_d, nu));
  const auto spectrum = symplectic_eigenvalues(out);
  if (spectrum.back() < kEigenFloor) {
    std::ostringstream msg;
    msg << "detector_cm: smallest symplectic eigenvalue " << spectrum.back() << " below 1";
    throw NumericalError(msg.str());
  }
  return out;
}

double mutual_information(const TwoModeCM& source, double transmissivity, const NoiseParams& noise) {
  check_transmissivity(transmissivity);
  const double t = transmissivity;
  const double x = source.mode_a;
  const double y = source.mode_b;
  const double z = source.corr;
  const double c = noise.eta_d * ((1.0 - t) + t * noise.epsilon) + (1.0 - noise.eta_d) * noise.nu;
  const double ratio = noise.eta_d * t * z * z / (noise.eta_d * t * x * y + c * x);
  if (!(ratio < 1.0)) throw NumericalError("mutual_information: conditional variance is not positive");
  return -0.5 * std::log2(1.0 - ratio);
}

double mutual_information_conditional(const TwoModeCM& source, double transmissivity,
                                      const NoiseParams& noise, Quadrature quadrature) {
  const TwoModeCM ab2 = evolve_channel(source, transmissivity, noise.epsilon);
  const CovarianceMatrix full(assemble_detector_cm(ab2, noise.eta_d, noise.nu));
  const CovarianceMatrix conditional = condition_on_homodyne(full, 3, quadrature);
  const Eigen::Index q = quadrature == Quadrature::x ? 0 : 1;
  const double v_a = full(q, q);
  const double v_a_given_b = conditional(q, q);
  if (!(v_a_given_b > 0.0)) throw NumericalError("mutual_information: conditional variance is not positive");
  return 0.5 * std::log2(v_a / v_a_given_b);
}

HolevoResult holevo_bound(const TwoModeCM& source, double transmissivity, const NoiseParams& noise,
                          Quadrature quadrature) {
  const TwoModeCM ab2 = evolve_channel(source, transmissivity, noise.epsilon);
  HolevoResult out;
  const auto [l1, l2] = two_mode_symplectic_eigenvalues(ab2);
  out.sympl_eigs[0] = clamp_eigenvalue(l1, "holevo_bound");
  out.sympl_eigs[1] = clamp_eigenvalue(l2, "holevo_bound");

  const CovarianceMatrix full(assemble_detector_cm(ab2, noise.eta_d, noise.nu));
  const auto conditional = symplectic_eigenvalues(condition_on_homodyne(full, 3, quadrature));
  for (std::size_t j = 0; j < 3; ++j) {
    out.sympl_eigs[2 + j] = clamp_eigenvalue(conditional[j], "holevo_bound");
  }

  double chi = thermal_entropy(out.sympl_eigs[0]) + thermal_entropy(out.sympl_eigs[1]);
  for (std::size_t j = 2; j < 5; ++j) chi -= thermal_entropy(out.sympl_eigs[j]);
  if (chi < -1e-9) {
    std::ostringstream msg;
    msg << "holevo_bound: negative Holevo information " << chi;
    throw NumericalError(msg.str());
  }
  out.chi = std::max(chi, 0.0);
  return out;
}

KeyRateResult key_rate(const ProtocolParams& params, double transmissivity) {
  params.noise.validate();
  check_transmissivity(transmissivity);
  const TwoModeCM source = source_cm(params.source);

  KeyRateResult out;
  out.success_prob = success_probability(params.source);
  out.mutual_info = mutual_information(source, transmissivity, params.noise);
  const HolevoResult eve = holevo_bound(source, transmissivity, params.noise);
  out.holevo = eve.chi;
  out.sympl_eigs = eve.sympl_eigs;
  out.raw_rate = out.success_prob * (params.noise.eta_r * out.mutual_info - out.holevo);
  out.rate = std::max(0.0, out.raw_rate);
  return out;
}

KeyRateResult average_key_rate(const ProtocolParams& params, const TransmissivityEnsemble& ensemble,
                               std::size_t workers) {
  const std::size_t n = ensemble.samples.size();
  if (n == 0) throw DomainError("average_key_rate: empty ensemble");
  std::vector<double> rate(n), raw(n), info(n), chi(n);
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const KeyRateResult r = key_rate(params, ensemble.samples[i]);
      rate[i] = r.rate;
      raw[i] = r.raw_rate;
      info[i] = r.mutual_info;
      chi[i] = r.holevo;
    }
  });
  const double inv_n = 1.0 / static_cast<double>(n);
  KeyRateResult out;
  out.rate = pairwise_sum(rate) * inv_n;
  out.raw_rate = pairwise_sum(raw) * inv_n;
  out.mutual_info = pairwise_sum(info) * inv_n;
  out.holevo = pairwise_sum(chi) * inv_n;
  out.success_prob = success_probability(params.source);
  return out;
}

double repeaterless_bound(double transmissivity) {
  if (!(transmissivity >= 0.0 && transmissivity < 1.0)) {
    throw DomainError("repeaterless_bound: transmissivity must be in [0, 1)");
  }
  return -std::log1p(-transmissivity) / std::numbers::ln2;
}

AveragedBound average_repeaterless_bound(const TransmissivityEnsemble& ensemble) {
  if (ensemble.samples.empty()) throw DomainError("average_repeaterless_bound: empty ensemble");
  std::vector<double> values;
  values.reserve(ensemble.samples.size());
  AveragedBound out;
  for (double t : ensemble.samples) {
    if (t >= 1.0 - 1e-15) {
      ++out.skipped;
      continue;
    }
    values.push_back(repeaterless_bound(t));
  }
  if (!values.empty()) out.value = pairwise_sum(values) / static_cast<double>(values.size());
  return out;
}

}  // namespace cvqkd
