// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <utility>

#include "cvqkd/channel.hpp"
#include "cvqkd/specfun.hpp"
#include "cvqkd/states.hpp"

namespace cvqkd {

/// Channel excess noise and receiver imperfections, shot-noise units.
struct NoiseParams {
  double epsilon = 0.1;  ///< input-referred excess noise
  double nu = 1.1;       ///< detector thermal noise (variance of the G0-H TMSV)
  double eta_d = 0.68;   ///< detector efficiency
  double eta_r = 0.95;   ///< reverse-reconciliation efficiency

  void validate() const;
};

struct ProtocolParams {
  SourceParams source;
  NoiseParams noise;
};

struct KeyRateResult {
  double rate = 0.0;      ///< bits/pulse, max(0, raw_rate)
  double raw_rate = 0.0;  ///< P_N (eta_r I - chi)
  double mutual_info = 0.0;
  double holevo = 0.0;
  double success_prob = 0.0;
  /// lambda_1, lambda_2 of gamma_AB2 then lambda_3..5 of gamma_AGH|B3.
  std::array<double, 5> sympl_eigs{};
};

struct HolevoResult {
  double chi = 0.0;
  std::array<double, 5> sympl_eigs{};
};

/// Loss T_E plus input excess noise epsilon acting on Bob's mode.
TwoModeCM evolve_channel(const TwoModeCM& gamma, double transmissivity, double epsilon);

/// Closed-form symplectic eigenvalues of a standard-form two-mode CM, sorted descending.
std::pair<double, double> two_mode_symplectic_eigenvalues(const TwoModeCM& gamma);

/// Covariance matrix of modes (A, G, H, B3) after Bob's detector model: B2
/// mixed on a beam splitter of transmissivity eta_d with one arm of a TMSV of
/// variance nu. Throws NumericalError if the result is unphysical.
CovarianceMatrix detector_cm(const TwoModeCM& gamma_ab2, double eta_d, double nu);

/// Alice-Bob mutual information in bits, closed form. `source` is the CM
/// before the channel.
double mutual_information(const TwoModeCM& source, double transmissivity, const NoiseParams& noise);

/// Same quantity from V_A / V_A|B3 with the conditional variance obtained by
/// conditioning detector_cm() on Bob's x homodyne.
double mutual_information_conditional(const TwoModeCM& source, double transmissivity,
                                      const NoiseParams& noise, Quadrature quadrature = Quadrature::x);

/// Eve's Holevo information S(AB2) - S(AGH|B3).
HolevoResult holevo_bound(const TwoModeCM& source, double transmissivity, const NoiseParams& noise,
                          Quadrature quadrature = Quadrature::x);

/// Reverse-reconciliation key rate for one channel transmissivity.
KeyRateResult key_rate(const ProtocolParams& params, double transmissivity);

/// Monte Carlo fading average of key_rate(); `rate` averages the clamped
/// per-sample rates, `raw_rate` the unclamped ones. Eigenvalue diagnostics are
/// not averaged and stay zero.
KeyRateResult average_key_rate(const ProtocolParams& params, const TransmissivityEnsemble& ensemble,
                               std::size_t workers = 0);

/// Pure-loss repeaterless capacity -log2(1 - T), T in [0, 1).
double repeaterless_bound(double transmissivity);

struct AveragedBound {
  double value = 0.0;
  std::size_t skipped = 0;  ///< samples with T >= 1 - 1e-15
};

AveragedBound average_repeaterless_bound(const TransmissivityEnsemble& ensemble);

}  // namespace cvqkd
