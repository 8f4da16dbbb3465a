// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <cmath>

#include "cvqkd/errors.hpp"
#include "cvqkd/optimize.hpp"

using namespace cvqkd;

namespace {

double rate_at(Scheme s, int n, SourcePoint p, double t) {
  return key_rate(make_protocol(s, n, p, NoiseParams{}), t).rate;
}

TransmissivityEnsemble fading_ensemble(double sigma_I2, std::size_t n, std::uint64_t seed) {
  TurbulenceScenario sc;
  sc.distance = 50e3;
  return sample_ensemble(beam_statistics(sc, sigma_I2), sc, ChannelModel::full(), n, seed);
}

}  // namespace

TEST_CASE("fixed-channel optimization") {
  const NoiseParams noise;
  const double t = transmissivity_from_db(20.0);
  const auto r = optimize_fixed(Scheme::photon_subtracted, 1, t, noise);
  CHECK(r.mode == OptimizationMode::fixed);
  CHECK_FALSE(r.zero_rate);
  CHECK(r.evaluations > 64 * 64);
  CHECK(r.best_rate == Approx(rate_at(Scheme::photon_subtracted, 1, {r.best_alpha2, r.best_ts}, t)).epsilon(1e-12));
  CHECK(r.best_rate >= rate_at(Scheme::photon_subtracted, 1, {20.0, 0.7}, t));
  for (double a2 : {0.01, 0.3, 2.0, 8.0, 100.0}) {
    for (double ts : {0.01, 0.4, 0.8, 0.999}) {
      CHECK(r.best_rate >= rate_at(Scheme::photon_subtracted, 1, {a2, ts}, t));
    }
  }
  CHECK(r.best_alpha2 >= 0.01);
  CHECK(r.best_alpha2 <= 100.0);
  CHECK(r.best_ts >= 0.01);
  CHECK(r.best_ts <= 0.999);

  SUBCASE("TMSV searches alpha2 only and its optimum grows at low loss") {
    const auto a = optimize_fixed(Scheme::tmsv, 0, transmissivity_from_db(5.0), noise);
    const auto b = optimize_fixed(Scheme::tmsv, 0, transmissivity_from_db(10.0), noise);
    const auto c = optimize_fixed(Scheme::tmsv, 0, transmissivity_from_db(15.0), noise);
    CHECK(a.best_ts == 1.0);
    CHECK(a.evaluations < 64 * 64);
    CHECK(a.best_alpha2 > b.best_alpha2);
    CHECK(b.best_alpha2 > c.best_alpha2);
  }

  SUBCASE("restarting from the optimum reproduces it") {
    const auto again = optimize_fixed(Scheme::photon_subtracted, 1, t, noise, {},
                                      SourcePoint{r.best_alpha2, r.best_ts});
    CHECK(again.best_rate == Approx(r.best_rate).epsilon(1e-6));
  }

  SUBCASE("deterministic") {
    const auto again = optimize_fixed(Scheme::photon_subtracted, 1, t, noise);
    CHECK(again.best_rate == r.best_rate);
    CHECK(again.best_alpha2 == r.best_alpha2);
  }

  SUBCASE("all-zero region is flagged") {
    const auto z = optimize_fixed(Scheme::photon_added, 3, transmissivity_from_db(30.0), noise);
    CHECK(z.zero_rate);
    CHECK(z.best_rate == 0.0);
    CHECK(z.best_raw_rate < 0.0);
  }

  CHECK_THROWS_AS(optimize_fixed(Scheme::tmsv, 0, 0.0, noise), DomainError);
  CHECK_THROWS_AS(optimize_fixed(Scheme::tmsv, 0, 1.0, noise), DomainError);
  SearchDomain bad;
  bad.alpha2_min = 200.0;
  CHECK_THROWS_AS(optimize_fixed(Scheme::tmsv, 0, 0.1, noise, bad), DomainError);
}

TEST_CASE("ensemble optimization") {
  const NoiseParams noise;
  SUBCASE("degenerate ensemble matches the fixed-channel optimum") {
    const double t = transmissivity_from_db(15.0);
    const auto flat = TransmissivityEnsemble::from_samples(std::vector<double>(64, t));
    const auto fixed = optimize_fixed(Scheme::photon_subtracted, 1, t, noise);
    const auto mean = optimize_mean_based(Scheme::photon_subtracted, 1, flat, noise);
    const auto per = optimize_per_sample(Scheme::photon_subtracted, 1, flat, noise);
    CHECK(mean.mode == OptimizationMode::mean_based);
    CHECK(per.mode == OptimizationMode::per_sample);
    CHECK(mean.best_rate == Approx(fixed.best_rate).epsilon(1e-12));
    CHECK(mean.best_alpha2 == fixed.best_alpha2);
    CHECK(per.best_rate == Approx(fixed.best_rate).epsilon(1e-12));
    CHECK(std::isnan(per.best_alpha2));
  }

  const auto ens = fading_ensemble(5.0, 1 << 14, 21);
  const double db = ens.mean_attenuation_db();
  REQUIRE(db > 23.0);
  REQUIRE(db < 27.0);

  SUBCASE("mean-based reports the fading average at its parameters") {
    const auto mean = optimize_mean_based(Scheme::tmsv, 0, ens, noise);
    const auto avg = average_key_rate(make_protocol(Scheme::tmsv, 0, {mean.best_alpha2, mean.best_ts}, noise), ens);
    CHECK(mean.best_rate == Approx(avg.rate).epsilon(1e-12));
    // fading spreads T upward, which the convex rate curve rewards
    const auto fixed = optimize_fixed(Scheme::tmsv, 0, ens.mean_T, noise);
    CHECK(mean.best_rate > fixed.best_rate);
  }

  SUBCASE("per-sample dominates mean-based, only slightly") {
    for (Scheme s : {Scheme::tmsv, Scheme::photon_subtracted}) {
      const auto mean = optimize_mean_based(s, 1, ens, noise);
      const auto per = optimize_per_sample(s, 1, ens, noise, {}, 128);
      CHECK(per.best_rate >= mean.best_rate - 1e-9);
      CHECK(per.best_rate < 2.0 * mean.best_rate);
    }
  }

  SUBCASE("table refinement converges") {
    const auto coarse = optimize_per_sample(Scheme::photon_subtracted, 1, ens, noise, {}, 64);
    const auto fine = optimize_per_sample(Scheme::photon_subtracted, 1, ens, noise, {}, 128);
    CHECK(std::abs(fine.best_rate - coarse.best_rate) < 0.005 * fine.best_rate);
  }
}

TEST_CASE("optimum table") {
  const NoiseParams noise;
  const OptimumTable table(Scheme::tmsv, 0, 1e-3, 1e-1, 9, noise);
  CHECK(table.size() == 9);
  const auto at_knot = optimize_fixed(Scheme::tmsv, 0, 1e-2, noise);
  CHECK(table.lookup(1e-2).alpha2 == Approx(at_knot.best_alpha2).epsilon(1e-9));
  CHECK(table.lookup(1e-6).alpha2 == table.lookup(1e-3).alpha2);
  CHECK(table.lookup(0.5).alpha2 == table.lookup(1e-1).alpha2);
  const OptimumTable single(Scheme::tmsv, 0, 0.01, 0.01, 1024, noise);
  CHECK(single.size() == 1);
  CHECK_THROWS_AS(OptimumTable(Scheme::tmsv, 0, 0.1, 0.01, 8, noise), DomainError);
}

TEST_CASE("mode names") {
  CHECK(mode_name(OptimizationMode::mean_based) == "mean_based");
  CHECK(mode_name(OptimizationMode::per_sample) == "per_sample");
}
