// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cvqkd/errors.hpp"

#ifndef CVQKD_VERSION
#define CVQKD_VERSION "0.0.0"
#endif

namespace cvqkd {

namespace {

using nlohmann::json;

constexpr std::pair<RunMode, std::string_view> kModeNames[] = {
    {RunMode::fixed_rate, "fixed-rate"},
    {RunMode::optimal_fixed, "optimal-fixed"},
    {RunMode::fading, "fading"},
    {RunMode::optimize_mean, "optimize-mean"},
    {RunMode::optimize_per_sample, "optimize-per-sample"},
    {RunMode::transmissivity_pdf, "transmissivity-pdf"},
};

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_real(raw(key), path(key));
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    return to_unsigned(raw(key), path(key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(to_real(v[i], path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown field");
    }
  }

  static double to_real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
  }

  static std::uint64_t to_unsigned(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> parse_attenuation(const json& node, const std::string& path) {
  if (node.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(Section::to_real(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }
  Section s(node, path);
  if (!s.has("start") || !s.has("stop")) throw ConfigError(path, "needs start and stop");
  const double start = s.real("start", 0.0);
  const double stop = s.real("stop", 0.0);
  const double step = s.real("step", 1.0);
  s.finish();
  if (!(step > 0.0)) throw ConfigError(join(path, "step"), "must be positive");
  if (stop < start) throw ConfigError(join(path, "stop"), "must not be below start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

TurbulenceScenario parse_scenario(const json& node, const std::string& path) {
  Section s(node, path);
  TurbulenceScenario sc;
  sc.wavelength = s.real("wavelength", sc.wavelength);
  sc.beam_waist = s.real("beam_waist", sc.beam_waist);
  sc.aperture_radius = s.real("aperture_radius", sc.aperture_radius);
  sc.distance = s.real("distance", sc.distance);
  sc.ground_altitude = s.real("ground_altitude", sc.ground_altitude);
  sc.wind_speed = s.real("wind_speed", sc.wind_speed);
  sc.cn2_ground = s.real("cn2_ground", sc.cn2_ground);
  const std::string link = s.text("link", "uplink");
  if (link == "uplink") {
    sc.link = LinkDirection::uplink;
  } else if (link == "downlink") {
    sc.link = LinkDirection::downlink;
  } else {
    throw ConfigError(s.path("link"), "expected \"uplink\" or \"downlink\"");
  }
  s.finish();
  try {
    sc.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return sc;
}

ChannelConfig parse_channel(const json& node, const std::string& path) {
  Section s(node, path);
  ChannelConfig c;
  const std::string model = s.text("model", "full");
  const double ratio = s.real("fixed_ratio", 2.0);
  if (model == "full") {
    c.model = ChannelModel::full();
  } else if (model == "wandering_only") {
    c.model = ChannelModel::wandering_only(ratio);
  } else {
    throw ConfigError(s.path("model"), "expected \"full\" or \"wandering_only\"");
  }
  if (!(ratio > 0.0)) throw ConfigError(s.path("fixed_ratio"), "must be positive");
  if (s.has("scenario")) c.scenario = parse_scenario(s.raw("scenario"), s.path("scenario"));
  c.scintillation = s.reals("scintillation", {});
  for (std::size_t i = 0; i < c.scintillation.size(); ++i) {
    if (!(c.scintillation[i] > 0.0)) {
      throw ConfigError(s.path("scintillation") + "[" + std::to_string(i) + "]", "must be positive");
    }
  }
  s.finish();
  return c;
}

void parse_optimizer(const json& node, const std::string& path, RunConfig& cfg) {
  Section s(node, path);
  SearchDomain& d = cfg.domain;
  d.alpha2_min = s.real("alpha2_min", d.alpha2_min);
  d.alpha2_max = s.real("alpha2_max", d.alpha2_max);
  d.ts_min = s.real("ts_min", d.ts_min);
  d.ts_max = s.real("ts_max", d.ts_max);
  d.grid = static_cast<int>(s.unsigned_int("grid", static_cast<std::uint64_t>(d.grid)));
  d.iterations = static_cast<int>(s.unsigned_int("iterations", static_cast<std::uint64_t>(d.iterations)));
  d.tolerance = s.real("tolerance", d.tolerance);
  cfg.table_knots = s.unsigned_int("knots", cfg.table_knots);
  s.finish();
}

template <typename Fn>
void rethrow_as_config(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

class TempFile {
 public:
  explicit TempFile(std::filesystem::path target)
      : target_(std::move(target)), temp_(target_.string() + ".partial") {}
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    if (!committed_) std::filesystem::remove(temp_, ec);
  }

  void write(const std::string& content) {
    std::ofstream out(temp_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp_.string());
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed: " + temp_.string());
  }

  void commit() {
    std::filesystem::rename(temp_, target_);
    committed_ = true;
  }

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  bool committed_ = false;
};

struct Variant {
  Scheme scheme;
  int photons;
};

std::vector<Variant> variants(const RunConfig& cfg) {
  std::vector<Variant> out;
  for (Scheme s : cfg.schemes) {
    if (s == Scheme::tmsv) {
      out.push_back({s, 0});
    } else {
      for (int n : cfg.photons) out.push_back({s, n});
    }
  }
  return out;
}

std::vector<double> ts_values(const RunConfig& cfg, Scheme scheme) {
  return scheme == Scheme::tmsv ? std::vector<double>{1.0} : cfg.ts;
}

double bound_at(double t) {
  return t >= 1.0 ? std::numeric_limits<double>::infinity() : repeaterless_bound(t);
}

void check_bound(const RateRow& row) {
  if (row.rate > row.rb + 1e-9) {
    std::ostringstream msg;
    msg << "rate " << format_real(row.rate) << " exceeds the repeaterless bound "
        << format_real(row.rb) << " at " << format_real(row.attenuation_db) << " dB";
    throw NumericalError(msg.str());
  }
}

struct Ensemble {
  double sigma_I2;
  TransmissivityEnsemble samples;
};

std::vector<Ensemble> build_ensembles(const RunConfig& cfg) {
  std::vector<Ensemble> out;
  const auto& ch = cfg.channel;
  if (ch.scintillation.empty()) {
    const BeamStatistics stats = beam_statistics(ch.scenario);
    out.push_back({stats.sigma_I2, sample_ensemble(stats, ch.scenario, ch.model, cfg.n_samples,
                                                   cfg.seed, cfg.workers)});
    return out;
  }
  for (std::size_t k = 0; k < ch.scintillation.size(); ++k) {
    const BeamStatistics stats = beam_statistics(ch.scenario, ch.scintillation[k]);
    out.push_back({ch.scintillation[k], sample_ensemble(stats, ch.scenario, ch.model, cfg.n_samples,
                                                        cfg.seed + k, cfg.workers)});
  }
  return out;
}

std::vector<RateRow> run_fixed_rate(const RunConfig& cfg) {
  std::vector<RateRow> rows;
  for (double db : cfg.attenuation_db) {
    const double t = transmissivity_from_db(db);
    for (const Variant& v : variants(cfg)) {
      for (double a2 : cfg.alpha2) {
        for (double ts : ts_values(cfg, v.scheme)) {
          const KeyRateResult r = key_rate(make_protocol(v.scheme, v.photons, {a2, ts}, cfg.noise), t);
          rows.push_back({db, v.scheme, v.photons, a2, ts, r.rate, bound_at(t), r.success_prob, 0,
                          cfg.seed});
        }
      }
    }
  }
  return rows;
}

std::vector<RateRow> run_optimal_fixed(const RunConfig& cfg) {
  std::vector<RateRow> rows;
  for (double db : cfg.attenuation_db) {
    const double t = transmissivity_from_db(db);
    for (const Variant& v : variants(cfg)) {
      const OptimizationResult r = optimize_fixed(v.scheme, v.photons, t, cfg.noise, cfg.domain);
      const double p =
          success_probability(make_protocol(v.scheme, v.photons, {r.best_alpha2, r.best_ts}, cfg.noise).source);
      rows.push_back({db, v.scheme, v.photons, r.best_alpha2, r.best_ts, r.best_rate, bound_at(t), p, 0,
                      cfg.seed});
    }
  }
  return rows;
}

std::vector<RateRow> run_fading(const RunConfig& cfg) {
  std::vector<RateRow> rows;
  for (const Ensemble& e : build_ensembles(cfg)) {
    const double db = e.samples.mean_attenuation_db();
    const double rb = average_repeaterless_bound(e.samples).value;
    for (const Variant& v : variants(cfg)) {
      for (double a2 : cfg.alpha2) {
        for (double ts : ts_values(cfg, v.scheme)) {
          const KeyRateResult r =
              average_key_rate(make_protocol(v.scheme, v.photons, {a2, ts}, cfg.noise), e.samples, cfg.workers);
          rows.push_back({db, v.scheme, v.photons, a2, ts, r.rate, rb, r.success_prob, e.samples.n_samples(),
                          e.samples.seed});
        }
      }
    }
  }
  return rows;
}

std::vector<RateRow> run_optimized_fading(const RunConfig& cfg, bool per_sample) {
  std::vector<RateRow> rows;
  for (const Ensemble& e : build_ensembles(cfg)) {
    const double db = e.samples.mean_attenuation_db();
    const double rb = average_repeaterless_bound(e.samples).value;
    for (const Variant& v : variants(cfg)) {
      const OptimizationResult r =
          per_sample ? optimize_per_sample(v.scheme, v.photons, e.samples, cfg.noise, cfg.domain, cfg.table_knots,
                                           cfg.workers)
                     : optimize_mean_based(v.scheme, v.photons, e.samples, cfg.noise, cfg.domain, cfg.workers);
      double p = std::numeric_limits<double>::quiet_NaN();
      if (!per_sample) {
        p = success_probability(make_protocol(v.scheme, v.photons, {r.best_alpha2, r.best_ts}, cfg.noise).source);
      }
      rows.push_back({db, v.scheme, v.photons, r.best_alpha2, r.best_ts, r.best_rate, rb, p, e.samples.n_samples(),
                      e.samples.seed});
    }
  }
  return rows;
}

std::string histogram_csv(const RunConfig& cfg) {
  std::string out = "sigma_I2,mean_attenuation_db,max_T,bin_lower,bin_upper,count,n_samples,seed\n";
  for (const Ensemble& e : build_ensembles(cfg)) {
    const EnsembleSummary s = ensemble_statistics(e.samples);
    for (const HistogramBin& b : s.histogram) {
      out += format_real(e.sigma_I2) + "," + format_real(s.mean_attenuation_db) + "," + format_real(s.max_T) + "," +
             format_real(b.lower) + "," + format_real(b.upper) + "," + std::to_string(b.count) + "," +
             std::to_string(e.samples.n_samples()) + "," + std::to_string(e.samples.seed) + "\n";
    }
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

}  // namespace

std::string_view run_mode_name(RunMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::optional<RunMode> parse_run_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  rethrow_as_config("noise", [&] { noise.validate(); });
  if (n_samples == 0) throw ConfigError("n_samples", "must be positive");
  if (schemes.empty()) throw ConfigError("schemes", "must not be empty");
  for (std::size_t i = 0; i < photons.size(); ++i) {
    if (photons[i] < 0) throw ConfigError("photons[" + std::to_string(i) + "]", "must be non-negative");
  }
  bool needs_photons = false;
  for (Scheme s : schemes) needs_photons |= s != Scheme::tmsv;
  if (needs_photons && photons.empty()) throw ConfigError("photons", "must not be empty");

  const bool sweeps_params = mode == RunMode::fixed_rate || mode == RunMode::fading;
  if (sweeps_params) {
    if (alpha2.empty()) throw ConfigError("alpha2", "must not be empty");
    if (needs_photons && ts.empty()) throw ConfigError("ts", "must not be empty");
    for (std::size_t i = 0; i < alpha2.size(); ++i) {
      if (!(alpha2[i] >= 0.0)) throw ConfigError("alpha2[" + std::to_string(i) + "]", "must be non-negative");
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!(ts[i] > 0.0 && ts[i] <= 1.0)) throw ConfigError("ts[" + std::to_string(i) + "]", "must be in (0, 1]");
    }
  }
  if (mode == RunMode::fixed_rate || mode == RunMode::optimal_fixed) {
    if (attenuation_db.empty()) throw ConfigError("attenuation_db", "must not be empty");
    for (std::size_t i = 0; i < attenuation_db.size(); ++i) {
      if (!(attenuation_db[i] > 0.0) && !(mode == RunMode::fixed_rate && attenuation_db[i] == 0.0)) {
        throw ConfigError("attenuation_db[" + std::to_string(i) + "]", "must be positive");
      }
    }
  }
  if (table_knots == 0) throw ConfigError("optimizer.knots", "must be positive");
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Section s(root, "");
  RunConfig cfg;
  cfg.source_text = root.dump();

  if (s.has("mode")) {
    const std::string name = s.text("mode", "");
    const auto mode = parse_run_mode(name);
    if (!mode) throw ConfigError("mode", "unknown mode \"" + name + "\"");
    cfg.mode = *mode;
  }
  if (!s.has("seed")) throw ConfigError("seed", "required");
  cfg.seed = s.unsigned_int("seed", 0);
  cfg.n_samples = s.unsigned_int("n_samples", cfg.n_samples);
  cfg.workers = s.unsigned_int("workers", cfg.workers);
  cfg.output_dir = s.text("output_dir", cfg.output_dir.string());

  if (s.has("schemes")) {
    const json& v = s.raw("schemes");
    if (!v.is_array()) throw ConfigError("schemes", "expected an array");
    cfg.schemes.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = "schemes[" + std::to_string(i) + "]";
      if (!v[i].is_string()) throw ConfigError(path, "expected a string");
      rethrow_as_config(path, [&] { cfg.schemes.push_back(parse_scheme(v[i].get<std::string>())); });
    }
  }
  if (s.has("photons")) {
    const json& v = s.raw("photons");
    if (!v.is_array()) throw ConfigError("photons", "expected an array");
    cfg.photons.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = "photons[" + std::to_string(i) + "]";
      const std::uint64_t n = Section::to_unsigned(v[i], path);
      if (n > 64) throw ConfigError(path, "too large");
      cfg.photons.push_back(static_cast<int>(n));
    }
  }
  cfg.alpha2 = s.reals("alpha2", cfg.alpha2);
  cfg.ts = s.reals("ts", cfg.ts);
  if (s.has("noise")) {
    Section n(s.raw("noise"), "noise");
    cfg.noise.epsilon = n.real("epsilon", cfg.noise.epsilon);
    cfg.noise.nu = n.real("nu", cfg.noise.nu);
    cfg.noise.eta_d = n.real("eta_d", cfg.noise.eta_d);
    cfg.noise.eta_r = n.real("eta_r", cfg.noise.eta_r);
    n.finish();
  }
  if (s.has("attenuation_db")) cfg.attenuation_db = parse_attenuation(s.raw("attenuation_db"), "attenuation_db");
  if (s.has("channel")) cfg.channel = parse_channel(s.raw("channel"), "channel");
  if (s.has("optimizer")) parse_optimizer(s.raw("optimizer"), "optimizer", cfg);
  s.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << value;
  return s.str();
}

std::string format_row(const RateRow& row) {
  std::string out;
  out += format_real(row.attenuation_db);
  out += ',';
  out += scheme_name(row.scheme);
  out += ',' + std::to_string(row.photons);
  out += ',' + format_real(row.alpha2);
  out += ',' + format_real(row.ts);
  out += ',' + format_real(row.rate);
  out += ',' + format_real(row.rb);
  out += ',' + format_real(row.success_prob);
  out += ',' + std::to_string(row.n_samples);
  out += ',' + std::to_string(row.seed);
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunSummary run(const RunConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);

  const std::string stem(run_mode_name(config.mode));
  RunSummary summary;
  summary.csv = config.output_dir / (stem + ".csv");
  summary.manifest = config.output_dir / (stem + ".manifest.json");

  std::string csv;
  if (config.mode == RunMode::transmissivity_pdf) {
    csv = histogram_csv(config);
    summary.rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
  } else {
    std::vector<RateRow> rows;
    switch (config.mode) {
      case RunMode::fixed_rate:
        rows = run_fixed_rate(config);
        break;
      case RunMode::optimal_fixed:
        rows = run_optimal_fixed(config);
        break;
      case RunMode::fading:
        rows = run_fading(config);
        break;
      case RunMode::optimize_mean:
        rows = run_optimized_fading(config, false);
        break;
      case RunMode::optimize_per_sample:
        rows = run_optimized_fading(config, true);
        break;
      case RunMode::transmissivity_pdf:
        break;
    }
    csv = std::string(kRateCsvHeader) + "\n";
    for (const RateRow& row : rows) {
      check_bound(row);
      csv += format_row(row) + "\n";
    }
    summary.rows = rows.size();
  }
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json manifest;
  manifest["mode"] = stem;
  manifest["config_hash"] = hex64(fnv1a(config.source_text));
  manifest["csv_hash"] = hex64(fnv1a(csv));
  manifest["version"] = CVQKD_VERSION;
  manifest["compiler"] = __VERSION__;
  manifest["seed"] = config.seed;
  manifest["n_samples"] = config.n_samples;
  manifest["rows"] = summary.rows;
  manifest["runtime_seconds"] = summary.seconds;

  TempFile csv_file(summary.csv);
  TempFile manifest_file(summary.manifest);
  csv_file.write(csv);
  manifest_file.write(manifest.dump(2) + "\n");
  csv_file.commit();
  manifest_file.commit();
  return summary;
}

}  // namespace cvqkd
