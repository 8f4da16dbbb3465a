// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cvqkd/errors.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

double attenuation_db(double transmissivity) { return -10.0 * std::log10(transmissivity); }

double transmissivity_from_db(double attenuation_db) { return std::pow(10.0, -attenuation_db / 10.0); }

double TransmissivityEnsemble::mean_attenuation_db() const { return attenuation_db(mean_T); }

TransmissivityEnsemble TransmissivityEnsemble::from_samples(std::vector<double> samples,
                                                            std::uint64_t seed) {
  if (samples.empty()) throw DomainError("ensemble: no samples");
  for (double t : samples) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("ensemble: sample outside [0, 1]");
  }
  TransmissivityEnsemble ens;
  ens.samples = std::move(samples);
  ens.seed = seed;
  ens.mean_T = pairwise_sum(ens.samples) / static_cast<double>(ens.samples.size());
  return ens;
}

BeamSample sample_beam(const BeamStatistics& stats, const TurbulenceScenario& scenario,
                       SampleStream& stream) {
  if (std::abs(stats.cov_theta) > stats.var_theta || stats.var_theta < 0.0 ||
      stats.var_centroid < 0.0) {
    throw NumericalError("sample_beam: invalid beam statistics covariance");
  }
  BeamSample sample;
  sample.beam_waist = scenario.beam_waist;
  const double spread = std::sqrt(stats.var_centroid);
  sample.x = spread * stream.normal();
  sample.y = spread * stream.normal();

  // Lower Cholesky factor of [[v, c], [c, v]].
  const double z1 = stream.normal();
  const double z2 = stream.normal();
  const double l11 = std::sqrt(stats.var_theta);
  const double l21 = l11 > 0.0 ? stats.cov_theta / l11 : 0.0;
  const double l22 = std::sqrt(std::max(stats.var_theta - l21 * l21, 0.0));
  sample.theta1 = stats.mean_theta + l11 * z1;
  sample.theta2 = stats.mean_theta + l21 * z1 + l22 * z2;
  sample.phi = std::numbers::pi * stream.uniform();
  return sample;
}

TransmissivityEnsemble sample_ensemble(const BeamStatistics& stats,
                                       const TurbulenceScenario& scenario,
                                       const ChannelModel& model, std::size_t n_samples,
                                       std::uint64_t seed, std::size_t workers) {
  if (n_samples == 0) throw DomainError("sample_ensemble: n_samples must be >= 1");
  if (model.kind == ChannelModel::Kind::wandering_only && !(model.fixed_ratio > 0.0)) {
    throw DomainError("sample_ensemble: fixed_ratio must be positive");
  }
  const double r0 = scenario.aperture_radius;
  const double fixed_radius = r0 / model.fixed_ratio;

  std::vector<double> raw(n_samples);
  parallel_chunks(n_samples, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SampleStream stream(seed, i);
      BeamSample beam = sample_beam(stats, scenario, stream);
      if (model.kind == ChannelModel::Kind::wandering_only) {
        beam = BeamSample::circular(beam.x, beam.y, fixed_radius, scenario.beam_waist);
      }
      raw[i] = try_transmissivity(beam, r0).value_or(std::numeric_limits<double>::quiet_NaN());
    }
  });

  TransmissivityEnsemble ens;
  ens.seed = seed;
  ens.samples.reserve(n_samples);
  for (double t : raw) {
    if (std::isnan(t)) {
      ++ens.n_flagged;
    } else {
      ens.samples.push_back(t);
    }
  }
  if (ens.samples.empty()) throw NumericalError("sample_ensemble: every sample was flagged");
  ens.mean_T = pairwise_sum(ens.samples) / static_cast<double>(ens.samples.size());
  return ens;
}

EnsembleSummary ensemble_statistics(const TransmissivityEnsemble& ensemble) {
  if (ensemble.samples.empty()) throw DomainError("ensemble_statistics: empty ensemble");
  EnsembleSummary summary;
  summary.mean_T = pairwise_sum(ensemble.samples) / static_cast<double>(ensemble.samples.size());
  summary.mean_attenuation_db = attenuation_db(summary.mean_T);
  summary.max_T = *std::max_element(ensemble.samples.begin(), ensemble.samples.end());

  summary.histogram.resize(kHistogramBins);
  const double width = 1.0 / static_cast<double>(kHistogramBins);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    summary.histogram[b].lower = static_cast<double>(b) * width;
    summary.histogram[b].upper = static_cast<double>(b + 1) * width;
  }
  for (double t : ensemble.samples) {
    auto bin = static_cast<std::size_t>(t * static_cast<double>(kHistogramBins));
    ++summary.histogram[std::min(bin, kHistogramBins - 1)].count;
  }
  return summary;
}

double calibrate_scintillation(const TurbulenceScenario& scenario, const ChannelModel& model,
                               double target_db, std::size_t n_samples, std::uint64_t seed,
                               double tol_db, std::size_t workers) {
  auto attenuation_at = [&](double log_sigma) {
    const auto stats = beam_statistics(scenario, std::exp(log_sigma));
    return sample_ensemble(stats, scenario, model, n_samples, seed, workers).mean_attenuation_db();
  };
  double lo = std::log(1e-4);
  double hi = std::log(1e4);
  const double at_lo = attenuation_at(lo);
  const double at_hi = attenuation_at(hi);
  if (!(target_db >= at_lo && target_db <= at_hi)) {
    throw DomainError("calibrate_scintillation: target attenuation not reachable at this distance");
  }
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double at_mid = attenuation_at(mid);
    if (std::abs(at_mid - target_db) <= tol_db) return std::exp(mid);
    (at_mid < target_db ? lo : hi) = mid;
  }
  throw NumericalError("calibrate_scintillation: bisection did not reach tolerance");
}

}  // namespace cvqkd
