// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/optimize.hpp"

namespace cvqkd {

enum class RunMode { fixed_rate, optimal_fixed, fading, optimize_mean, optimize_per_sample, transmissivity_pdf };

std::string_view run_mode_name(RunMode mode);  ///< "fixed-rate", "optimal-fixed", ...
std::optional<RunMode> parse_run_mode(std::string_view name);

struct ChannelConfig {
  ChannelModel model;
  TurbulenceScenario scenario;
  /// Scintillation indices to sweep. Empty: derive a single index from the
  /// scenario's turbulence profile.
  std::vector<double> scintillation;
};

struct RunConfig {
  RunMode mode = RunMode::fixed_rate;
  std::uint64_t seed = 0;
  std::size_t n_samples = kDefaultSamples;
  std::size_t workers = 0;
  std::filesystem::path output_dir = ".";
  std::vector<Scheme> schemes{Scheme::tmsv, Scheme::photon_subtracted, Scheme::photon_added};
  std::vector<int> photons{1};
  std::vector<double> alpha2{5.0};
  std::vector<double> ts{0.7};
  NoiseParams noise;
  std::vector<double> attenuation_db;  ///< fixed-channel sweeps
  ChannelConfig channel;
  SearchDomain domain;
  std::size_t table_knots = kDefaultTableKnots;
  std::string source_text;  ///< canonical form of the parsed config, hashed into the manifest

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config. `seed` is required. Errors carry the field path.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// One CSV row of a rate run.
struct RateRow {
  double attenuation_db = 0.0;
  Scheme scheme = Scheme::tmsv;
  int photons = 0;
  double alpha2 = 0.0;
  double ts = 1.0;
  double rate = 0.0;
  double rb = 0.0;
  double success_prob = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kRateCsvHeader =
    "attenuation_db,scheme,N,alpha2,T_S,rate,rb,success_prob,n_samples,seed";

/// 17 significant digits; "nan" / "inf" for non-finite values.
std::string format_real(double value);
std::string format_row(const RateRow& row);

struct RunSummary {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::size_t rows = 0;
  double seconds = 0.0;
};

/// Executes the configured mode and writes <mode>.csv plus
/// <mode>.manifest.json into output_dir. Files are written to a temporary
/// name and renamed on success; nothing is left behind on failure. Throws
/// NumericalError if any clamped rate exceeds the repeaterless bound.
RunSummary run(const RunConfig& config);

/// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace cvqkd
