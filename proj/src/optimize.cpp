// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "cvqkd/errors.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

namespace {

using Point = std::array<double, 2>;

// Maps the unit box onto (ln alpha2, T_S).
class Objective {
 public:
  Objective(Scheme scheme, int photons, double transmissivity, const NoiseParams& noise,
            const SearchDomain& domain)
      : scheme_(scheme),
        photons_(photons),
        transmissivity_(transmissivity),
        noise_(noise),
        domain_(domain),
        log_lo_(std::log(domain.alpha2_min)),
        log_hi_(std::log(domain.alpha2_max)) {}

  int dims() const { return scheme_ == Scheme::tmsv ? 1 : 2; }

  SourcePoint to_source(const Point& p) const {
    SourcePoint s;
    s.alpha2 = std::exp(log_lo_ + p[0] * (log_hi_ - log_lo_));
    s.ts = scheme_ == Scheme::tmsv ? 1.0 : domain_.ts_min + p[1] * (domain_.ts_max - domain_.ts_min);
    return s;
  }

  Point to_unit(const SourcePoint& s) const {
    Point p{(std::log(s.alpha2) - log_lo_) / (log_hi_ - log_lo_), 0.0};
    if (scheme_ != Scheme::tmsv) p[1] = (s.ts - domain_.ts_min) / (domain_.ts_max - domain_.ts_min);
    for (double& c : p) c = std::clamp(c, 0.0, 1.0);
    return p;
  }

  double operator()(const Point& p) {
    ++evaluations_;
    return key_rate(make_protocol(scheme_, photons_, to_source(p), noise_), transmissivity_).raw_rate;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  Scheme scheme_;
  int photons_;
  double transmissivity_;
  NoiseParams noise_;
  SearchDomain domain_;
  double log_lo_;
  double log_hi_;
  std::size_t evaluations_ = 0;
};

Point clamp_unit(Point p) {
  for (double& c : p) c = std::clamp(c, 0.0, 1.0);
  return p;
}

// Maximizing Nelder-Mead on the unit box; trial points are projected back
// into the box.
std::pair<Point, double> nelder_mead(Objective& f, Point start, double step, int iterations,
                                     double tolerance) {
  const int d = f.dims();
  std::vector<Point> vertex(static_cast<std::size_t>(d + 1), start);
  for (int k = 0; k < d; ++k) {
    Point& v = vertex[static_cast<std::size_t>(k + 1)];
    v[static_cast<std::size_t>(k)] += start[static_cast<std::size_t>(k)] + step <= 1.0 ? step : -step;
  }
  std::vector<double> value(vertex.size());
  for (std::size_t i = 0; i < vertex.size(); ++i) value[i] = f(vertex[i]);

  auto combine = [d](const Point& a, const Point& b, double t) {
    Point out{0.0, 0.0};
    for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(k)] = a[k] + t * (b[k] - a[k]);
    return clamp_unit(out);
  };

  std::vector<std::size_t> order(vertex.size());
  for (int iter = 0; iter < iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const double spread = value[best] - value[worst];
    double size = 0.0;
    for (std::size_t i = 0; i < vertex.size(); ++i) {
      for (int k = 0; k < d; ++k) size = std::max(size, std::abs(vertex[i][k] - vertex[best][k]));
    }
    if (spread <= tolerance * std::abs(value[best]) || size < 1e-12) break;

    Point centroid{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      for (int k = 0; k < d; ++k) centroid[k] += vertex[order[i]][k] / d;
    }
    const Point reflected = combine(centroid, vertex[worst], -1.0);
    const double f_reflected = f(reflected);
    const std::size_t second_worst = order[order.size() - 2];
    if (f_reflected > value[best]) {
      const Point expanded = combine(centroid, vertex[worst], -2.0);
      const double f_expanded = f(expanded);
      if (f_expanded > f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected > value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected > value[worst];
    const Point contracted = combine(centroid, outside ? reflected : vertex[worst], 0.5);
    const double f_contracted = f(contracted);
    if (f_contracted > std::max(value[worst], outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i < vertex.size(); ++i) {
      if (i == best) continue;
      vertex[i] = combine(vertex[best], vertex[i], 0.5);
      value[i] = f(vertex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin());
  return {vertex[best], value[best]};
}

void check_domain(const SearchDomain& domain) {
  if (!(domain.alpha2_min > 0.0 && domain.alpha2_max > domain.alpha2_min)) {
    throw DomainError("SearchDomain: need 0 < alpha2_min < alpha2_max");
  }
  if (!(domain.ts_min > 0.0 && domain.ts_max > domain.ts_min && domain.ts_max <= 1.0)) {
    throw DomainError("SearchDomain: need 0 < ts_min < ts_max <= 1");
  }
  if (domain.grid < 2) throw DomainError("SearchDomain: grid needs at least 2 points per axis");
  if (domain.iterations < 0 || !(domain.tolerance > 0.0)) {
    throw DomainError("SearchDomain: invalid simplex schedule");
  }
}

OptimizationResult finish(const Objective& f, const Point& p, double raw, const SearchDomain& domain) {
  OptimizationResult out;
  const SourcePoint s = f.to_source(p);
  out.best_alpha2 = s.alpha2;
  out.best_ts = s.ts;
  out.best_raw_rate = raw;
  out.best_rate = std::max(0.0, raw);
  out.zero_rate = !(raw > 0.0);
  out.mode = OptimizationMode::fixed;
  out.domain = domain;
  out.evaluations = f.evaluations();
  return out;
}

}  // namespace

std::string_view mode_name(OptimizationMode mode) {
  switch (mode) {
    case OptimizationMode::fixed:
      return "fixed";
    case OptimizationMode::mean_based:
      return "mean_based";
    case OptimizationMode::per_sample:
      return "per_sample";
  }
  return "?";
}

ProtocolParams make_protocol(Scheme scheme, int photons, SourcePoint point, const NoiseParams& noise) {
  ProtocolParams p;
  p.source.scheme = scheme;
  p.source.alpha2 = point.alpha2;
  p.source.ts = scheme == Scheme::tmsv ? 1.0 : point.ts;
  p.source.photons = scheme == Scheme::tmsv ? 0 : photons;
  p.noise = noise;
  return p;
}

OptimizationResult optimize_fixed(Scheme scheme, int photons, double transmissivity,
                                  const NoiseParams& noise, const SearchDomain& domain,
                                  std::optional<SourcePoint> start) {
  check_domain(domain);
  if (!(transmissivity > 0.0 && transmissivity < 1.0)) {
    throw DomainError("optimize_fixed: transmissivity must be in (0, 1)");
  }
  Objective f(scheme, photons, transmissivity, noise, domain);
  const double step = 1.0 / (domain.grid - 1);

  Point best{0.0, 0.0};
  if (start) {
    best = f.to_unit(*start);
  } else {
    double best_value = -std::numeric_limits<double>::infinity();
    const int ts_points = f.dims() == 1 ? 1 : domain.grid;
    for (int i = 0; i < domain.grid; ++i) {
      for (int j = 0; j < ts_points; ++j) {
        const Point p{i * step, j * step};
        const double v = f(p);
        if (v > best_value) {
          best_value = v;
          best = p;
        }
      }
    }
  }
  const auto [point, value] = nelder_mead(f, best, step, domain.iterations, domain.tolerance);
  return finish(f, point, value, domain);
}

OptimizationResult optimize_mean_based(Scheme scheme, int photons,
                                       const TransmissivityEnsemble& ensemble,
                                       const NoiseParams& noise, const SearchDomain& domain,
                                       std::size_t workers) {
  if (ensemble.samples.empty()) throw DomainError("optimize_mean_based: empty ensemble");
  OptimizationResult out = optimize_fixed(scheme, photons, ensemble.mean_T, noise, domain);
  const auto averaged = average_key_rate(
      make_protocol(scheme, photons, {out.best_alpha2, out.best_ts}, noise), ensemble, workers);
  out.best_rate = averaged.rate;
  out.best_raw_rate = averaged.raw_rate;
  out.zero_rate = !(averaged.rate > 0.0);
  out.mode = OptimizationMode::mean_based;
  out.evaluations += ensemble.samples.size();
  return out;
}

OptimumTable::OptimumTable(Scheme scheme, int photons, double t_min, double t_max, std::size_t knots,
                           const NoiseParams& noise, const SearchDomain& domain, std::size_t workers) {
  if (!(t_min > 0.0 && t_max >= t_min && t_max < 1.0)) {
    throw DomainError("OptimumTable: need 0 < t_min <= t_max < 1");
  }
  if (knots == 0) throw DomainError("OptimumTable: need at least one knot");
  if (t_max == t_min) knots = 1;

  log_t_.resize(knots);
  log_alpha2_.resize(knots);
  ts_.resize(knots);
  std::vector<std::size_t> evals(knots);
  const double lo = std::log(t_min);
  const double hi = std::log(t_max);
  for (std::size_t k = 0; k < knots; ++k) {
    log_t_[k] = knots == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(knots - 1);
  }
  if (knots > 1) log_t_.back() = hi;
  parallel_chunks(knots, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto r = optimize_fixed(scheme, photons, std::exp(log_t_[k]), noise, domain);
      log_alpha2_[k] = std::log(r.best_alpha2);
      ts_[k] = r.best_ts;
      evals[k] = r.evaluations;
    }
  });
  evaluations_ = std::accumulate(evals.begin(), evals.end(), std::size_t{0});
}

SourcePoint OptimumTable::lookup(double transmissivity) const {
  if (log_t_.size() == 1) return {std::exp(log_alpha2_[0]), ts_[0]};
  const double x = std::log(transmissivity);
  if (!(x > log_t_.front())) return {std::exp(log_alpha2_.front()), ts_.front()};
  if (x >= log_t_.back()) return {std::exp(log_alpha2_.back()), ts_.back()};
  const auto hi = static_cast<std::size_t>(std::upper_bound(log_t_.begin(), log_t_.end(), x) - log_t_.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - log_t_[lo]) / (log_t_[hi] - log_t_[lo]);
  return {std::exp(log_alpha2_[lo] + w * (log_alpha2_[hi] - log_alpha2_[lo])),
          ts_[lo] + w * (ts_[hi] - ts_[lo])};
}

OptimizationResult optimize_per_sample(Scheme scheme, int photons,
                                       const TransmissivityEnsemble& ensemble,
                                       const NoiseParams& noise, const SearchDomain& domain,
                                       std::size_t knots, std::size_t workers) {
  const std::size_t n = ensemble.samples.size();
  if (n == 0) throw DomainError("optimize_per_sample: empty ensemble");
  const OptimizationResult at_mean = optimize_fixed(scheme, photons, ensemble.mean_T, noise, domain);
  const ProtocolParams mean_params =
      make_protocol(scheme, photons, {at_mean.best_alpha2, at_mean.best_ts}, noise);

  double t_min = 1.0;
  double t_max = 0.0;
  for (double t : ensemble.samples) {
    if (t > 0.0) t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  std::optional<OptimumTable> table;
  if (t_max > 0.0) {
    table.emplace(scheme, photons, t_min, std::min(t_max, 1.0 - 1e-12), knots, noise, domain, workers);
  }

  std::vector<double> rate(n), raw(n);
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double t = ensemble.samples[i];
      KeyRateResult r = key_rate(mean_params, t);
      if (table && t > 0.0) {
        const KeyRateResult local = key_rate(make_protocol(scheme, photons, table->lookup(t), noise), t);
        if (local.raw_rate > r.raw_rate) r = local;
      }
      rate[i] = r.rate;
      raw[i] = r.raw_rate;
    }
  });

  OptimizationResult out;
  out.best_alpha2 = std::numeric_limits<double>::quiet_NaN();
  out.best_ts = std::numeric_limits<double>::quiet_NaN();
  out.best_rate = pairwise_sum(rate) / static_cast<double>(n);
  out.best_raw_rate = pairwise_sum(raw) / static_cast<double>(n);
  out.zero_rate = !(out.best_rate > 0.0);
  out.mode = OptimizationMode::per_sample;
  out.domain = domain;
  out.evaluations = at_mean.evaluations + (table ? table->evaluations() : 0) + 2 * n;
  return out;
}

}  // namespace cvqkd
