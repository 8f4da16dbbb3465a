// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cvqkd/atmosphere.hpp"
#include "cvqkd/beam.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd {

struct ChannelModel {
  enum class Kind { full, wandering_only };

  Kind kind = Kind::full;
  /// r0 / W of the fixed circular beam used by wandering_only.
  double fixed_ratio = 2.0;

  static ChannelModel full() { return {}; }
  static ChannelModel wandering_only(double ratio = 2.0) { return {Kind::wandering_only, ratio}; }
};

/// Monte Carlo transmissivity samples. Samples whose shaping functions left
/// their valid range are dropped and counted in `n_flagged`.
struct TransmissivityEnsemble {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::size_t n_flagged = 0;
  double mean_T = 0.0;

  std::size_t n_samples() const { return samples.size(); }
  double mean_attenuation_db() const;

  /// Wraps an explicit list of samples (tests, externally measured channels).
  static TransmissivityEnsemble from_samples(std::vector<double> samples, std::uint64_t seed = 0);
};

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct EnsembleSummary {
  double mean_T = 0.0;
  double mean_attenuation_db = 0.0;
  double max_T = 0.0;
  std::vector<HistogramBin> histogram;  ///< 200 equal bins on [0, 1]
};

inline constexpr std::size_t kDefaultSamples = std::size_t{1} << 20;
inline constexpr std::size_t kHistogramBins = 200;

double attenuation_db(double transmissivity);
double transmissivity_from_db(double attenuation_db);

/// Draws one beam realization: Gaussian centroid, bivariate Gaussian log
/// semi-axes, uniform orientation on [0, pi).
BeamSample sample_beam(const BeamStatistics& stats, const TurbulenceScenario& scenario,
                       SampleStream& stream);

/// Generates n_samples transmissivities. Sample i uses the stream keyed by
/// (seed, i), so the result is bitwise independent of `workers`.
TransmissivityEnsemble sample_ensemble(const BeamStatistics& stats,
                                       const TurbulenceScenario& scenario,
                                       const ChannelModel& model, std::size_t n_samples,
                                       std::uint64_t seed, std::size_t workers = 0);

EnsembleSummary ensemble_statistics(const TransmissivityEnsemble& ensemble);

/// Bisects (in log space) for the scintillation index whose ensemble mean
/// attenuation is within tol_db of target_db. Uses common random numbers.
double calibrate_scintillation(const TurbulenceScenario& scenario, const ChannelModel& model,
                               double target_db, std::size_t n_samples, std::uint64_t seed,
                               double tol_db = 0.05, std::size_t workers = 0);

}  // namespace cvqkd
