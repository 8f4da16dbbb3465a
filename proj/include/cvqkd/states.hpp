// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "cvqkd/specfun.hpp"

namespace cvqkd {

/// Source preparation. TMSV is unmodified; T-PS and T-PA herald on a
/// beam-splitter ancilla.
enum class Scheme { tmsv, photon_subtracted, photon_added };

std::string_view scheme_name(Scheme scheme);  ///< "TMSV", "T-PS", "T-PA"
Scheme parse_scheme(std::string_view name);

struct SourceParams {
  Scheme scheme = Scheme::tmsv;
  double alpha2 = 0.0;  ///< mean photon number of the initial TMSV
  double ts = 1.0;      ///< beam-splitter transmissivity T_S
  int photons = 0;      ///< N
  /// Multiplier on the heralding probability (1 = ideal Fock-state source and detector).
  double herald_efficiency = 1.0;

  static SourceParams tmsv(double alpha2) { return {Scheme::tmsv, alpha2, 1.0, 0, 1.0}; }

  /// Throws DomainError on alpha2 < 0, T_S outside (0, 1], N < 0, or TMSV with N != 0.
  void validate() const;
};

/// Two-mode covariance matrix in standard form
///   [[a I, c Z], [c Z, b I]],  Z = diag(1, -1).
struct TwoModeCM {
  double mode_a = 1.0;
  double mode_b = 1.0;
  double corr = 0.0;

  CovarianceMatrix full() const;
  /// a, b >= 1 and a b - c^2 >= 1 - tol.
  bool is_physical(double tol = 1e-9) const;
};

TwoModeCM tmsv_cm(double alpha2);

/// Squeezing in dB of a TMSV with mean photon number alpha2 (sinh^2 r = alpha2).
double squeezing_db(double alpha2);

/// Probability of detecting N photons in the ancilla after subtraction.
double subtraction_probability(double alpha2, double ts, int photons);

/// Probability of detecting vacuum in the ancilla after injecting N photons.
double addition_probability(double alpha2, double ts, int photons);

TwoModeCM pss_cm(double alpha2, double ts, int photons);
TwoModeCM pas_cm(double alpha2, double ts, int photons);

/// Covariance matrix of the state Alice holds before transmission.
TwoModeCM source_cm(const SourceParams& params);

/// Heralding probability P_N; 1 for TMSV. T-PS is realized as photon
/// addition on Alice's mode, so it shares the addition probability.
double success_probability(const SourceParams& params);

/// Truncated two-mode Fock expansion with real amplitudes.
struct FockTwoModeState {
  std::map<std::pair<int, int>, double> coefficients;  ///< (n_A, n_B) -> amplitude
  int n_max = 0;
  double tail = 0.0;  ///< 1 - sum |c|^2 (norm lost to the cutoff)

  double amplitude(int n_a, int n_b) const;
  double norm_sq() const;
};

/// Cutoff where the geometric tail of the initial TMSV drops below 1e-12,
/// doubled (plus N) to leave room for N-photon operations.
int default_cutoff(const SourceParams& params);

/// Fock amplitudes of the prepared state, global (-1)^N phase dropped.
/// Throws NumericalError if the truncated tail exceeds 1e-10.
FockTwoModeState fock_ket(const SourceParams& params, int n_max);
FockTwoModeState fock_ket(const SourceParams& params);

/// Second moments of a Fock state with zero first moments (hbar = 2).
CovarianceMatrix fock_covariance(const FockTwoModeState& state);

/// fock_covariance() reduced to standard form; throws NumericalError if the
/// state is not in standard form to 1e-8.
TwoModeCM oracle_cm_from_fock(const FockTwoModeState& state);

}  // namespace cvqkd
