// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/keyrate.hpp"

namespace cvqkd {

/// Box for the joint (alpha2, T_S) search plus the grid/simplex schedule.
struct SearchDomain {
  double alpha2_min = 0.01;
  double alpha2_max = 100.0;
  double ts_min = 0.01;
  double ts_max = 0.999;
  int grid = 64;            ///< points per axis; alpha2 is log-spaced
  int iterations = 200;     ///< Nelder-Mead iteration cap
  double tolerance = 1e-6;  ///< relative spread of simplex rates at convergence
};

enum class OptimizationMode { fixed, mean_based, per_sample };

std::string_view mode_name(OptimizationMode mode);

struct SourcePoint {
  double alpha2 = 0.0;
  double ts = 1.0;
};

struct OptimizationResult {
  double best_alpha2 = 0.0;  ///< NaN for per_sample (parameters vary per sample)
  double best_ts = 1.0;      ///< 1 for TMSV, NaN for per_sample
  double best_rate = 0.0;    ///< clamped key rate (fading average for ensembles)
  double best_raw_rate = 0.0;
  OptimizationMode mode = OptimizationMode::fixed;
  SearchDomain domain;
  std::size_t evaluations = 0;
  bool zero_rate = false;  ///< no positive rate anywhere in the domain
};

ProtocolParams make_protocol(Scheme scheme, int photons, SourcePoint point, const NoiseParams& noise);

/// Maximizes the key rate at a fixed transmissivity: coarse grid, then a
/// Nelder-Mead simplex from the best grid point. When `start` is given the
/// grid is skipped and the simplex starts there. TMSV searches alpha2 only.
OptimizationResult optimize_fixed(Scheme scheme, int photons, double transmissivity,
                                  const NoiseParams& noise, const SearchDomain& domain = {},
                                  std::optional<SourcePoint> start = std::nullopt);

/// Optimizes for the ensemble mean transmissivity, then reports the fading
/// average of the rate at those parameters.
OptimizationResult optimize_mean_based(Scheme scheme, int photons,
                                       const TransmissivityEnsemble& ensemble,
                                       const NoiseParams& noise, const SearchDomain& domain = {},
                                       std::size_t workers = 0);

/// Fixed-transmissivity optima on log-spaced knots, interpolated in log T.
class OptimumTable {
 public:
  OptimumTable(Scheme scheme, int photons, double t_min, double t_max, std::size_t knots,
               const NoiseParams& noise, const SearchDomain& domain = {}, std::size_t workers = 0);

  /// Interpolated (alpha2, T_S); clamps outside [t_min, t_max].
  SourcePoint lookup(double transmissivity) const;

  std::size_t size() const { return log_t_.size(); }
  std::size_t evaluations() const { return evaluations_; }

 private:
  std::vector<double> log_t_;
  std::vector<double> log_alpha2_;
  std::vector<double> ts_;
  std::size_t evaluations_ = 0;
};

inline constexpr std::size_t kDefaultTableKnots = 1024;

/// Per-sample feedback: each sample uses the better of the table optimum at
/// its own T and the mean-transmissivity optimum, so the result never falls
/// below optimize_mean_based() on the same ensemble.
OptimizationResult optimize_per_sample(Scheme scheme, int photons,
                                       const TransmissivityEnsemble& ensemble,
                                       const NoiseParams& noise, const SearchDomain& domain = {},
                                       std::size_t knots = kDefaultTableKnots,
                                       std::size_t workers = 0);

}  // namespace cvqkd
