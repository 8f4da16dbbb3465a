// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <cmath>
#include <map>
#include <random>

#include "cvqkd/errors.hpp"
#include "cvqkd/states.hpp"
#include "fock_oracle.hpp"

using namespace cvqkd;

using namespace fock_oracle;

TEST_CASE("TMSV covariance and squeezing") {
  const auto vac = tmsv_cm(0.0);
  CHECK(vac.mode_a == 1.0);
  CHECK(vac.mode_b == 1.0);
  CHECK(vac.corr == 0.0);
  for (double a2 : {0.1, 1.0, 7.0, 20.0, 100.0}) {
    const auto g = tmsv_cm(a2);
    CHECK(g.mode_a * g.mode_b - g.corr * g.corr == Approx(1.0).epsilon(1e-12));
  }
  const auto g20 = tmsv_cm(20.0);
  CHECK(g20.mode_a == 41.0);
  CHECK(g20.mode_b == 41.0);
  CHECK(g20.corr == Approx(2.0 * std::sqrt(420.0)).epsilon(1e-15));

  CHECK(squeezing_db(0.0) == 0.0);
  CHECK(std::abs(squeezing_db(10.0) - 16.0) < 0.5);
  double previous = -1.0;
  for (double a2 = 0.01; a2 < 100.0; a2 *= 1.3) {
    CHECK(squeezing_db(a2) > previous);
    previous = squeezing_db(a2);
  }
}

TEST_CASE("heralding probabilities") {
  CHECK(subtraction_probability(1.0, 0.5, 1) == Approx(0.5 / 2.25).epsilon(1e-14));
  CHECK(subtraction_probability(3.0, 1.0, 1) == 0.0);
  CHECK(addition_probability(3.0, 1.0, 2) == 0.0);
  CHECK(addition_probability(1.0, 0.5, 2) / subtraction_probability(1.0, 0.5, 2) == Approx(4.0).epsilon(1e-12));

  double total = 0.0;
  for (int n = 0; n <= 60; ++n) total += subtraction_probability(5.0, 0.7, n);
  CHECK(total >= 1.0 - 1e-10);
  CHECK(total <= 1.0 + 1e-12);

  for (double a2 : {1.0, 5.0, 20.0}) {
    for (double ts : {0.5, 0.7, 0.9}) {
      for (int n = 0; n <= 3; ++n) {
        const double ratio = addition_probability(a2, ts, n) / subtraction_probability(a2, ts, n);
        CHECK(ratio == Approx(std::pow(1.0 + 1.0 / a2, n)).epsilon(1e-12));
        const int cut = cutoff_for(a2);
        CHECK(subtraction_probability(a2, ts, n) == Approx(herald(a2, ts, 0, n, cut).probability).epsilon(1e-10));
        CHECK(addition_probability(a2, ts, n) == Approx(herald(a2, ts, n, 0, cut).probability).epsilon(1e-10));
      }
    }
  }
  CHECK(addition_probability(2.0, 0.7, 1) == Approx(herald(2.0, 0.7, 1, 0, 200).probability).epsilon(1e-10));
  CHECK_THROWS_AS(subtraction_probability(-1.0, 0.5, 1), DomainError);
  CHECK_THROWS_AS(subtraction_probability(1.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(addition_probability(1.0, 0.5, -1), DomainError);
}

TEST_CASE("heralded covariance matrices") {
  SUBCASE("N = 0 collapses to a TMSV") {
    const auto s = pss_cm(5.0, 0.7, 0);
    const auto a = pas_cm(5.0, 0.7, 0);
    const double t = 5.0 * 0.7 / 6.0;
    const auto ref = tmsv_cm(t / (1 - t));
    CHECK(s.mode_a == Approx(ref.mode_a).epsilon(1e-14));
    CHECK(s.corr == Approx(ref.corr).epsilon(1e-14));
    CHECK(a.mode_a == Approx(s.mode_a).epsilon(1e-15));
    CHECK(a.mode_b == Approx(s.mode_b).epsilon(1e-15));
    CHECK(s.mode_a * s.mode_b - s.corr * s.corr == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("determinant law") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> a2(0.05, 50.0), ts(0.05, 0.99);
    for (int n = 0; n <= 5; ++n) {
      for (int i = 0; i < 20; ++i) {
        const auto g = pss_cm(a2(gen), ts(gen), n);
        CHECK(g.mode_a * g.mode_b - g.corr * g.corr == Approx(2.0 * n + 1.0).epsilon(1e-9));
        CHECK(g.is_physical());
      }
    }
  }
  SUBCASE("added photons land on Bob's mode") {
    for (int n = 1; n <= 3; ++n) {
      const auto s = pss_cm(5.0, 0.7, n);
      const auto a = pas_cm(5.0, 0.7, n);
      CHECK(a.mode_b > s.mode_b);
      CHECK(a.mode_a - a.mode_b == Approx(-2.0 * n).epsilon(1e-12));
    }
  }
  SUBCASE("brute-force Fock moments") {
    for (double a2 : {1.0, 5.0, 20.0}) {
      for (double ts : {0.5, 0.7, 0.9}) {
        for (int n = 0; n <= 3; ++n) {
          const int cut = cutoff_for(a2);
          const auto sub = moments(herald(a2, ts, 0, n, cut));
          const auto add = moments(herald(a2, ts, n, 0, cut));
          const auto s = pss_cm(a2, ts, n);
          const auto a = pas_cm(a2, ts, n);
          CHECK(sub.mode_a == Approx(s.mode_a).epsilon(1e-8));
          CHECK(sub.mode_b == Approx(s.mode_b).epsilon(1e-8));
          CHECK(sub.corr == Approx(s.corr).epsilon(1e-8));
          CHECK(add.mode_a == Approx(a.mode_a).epsilon(1e-8));
          CHECK(add.mode_b == Approx(a.mode_b).epsilon(1e-8));
          CHECK(add.corr == Approx(a.corr).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("source parameters") {
  CHECK_THROWS_AS((SourceParams{Scheme::tmsv, 1.0, 1.0, 1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((SourceParams{Scheme::photon_subtracted, 1.0, 1.5, 1, 1.0}.validate()), DomainError);
  CHECK(success_probability(SourceParams::tmsv(3.0)) == 1.0);
  const SourceParams ps{Scheme::photon_subtracted, 20.0, 0.7, 1, 1.0};
  const SourceParams pa{Scheme::photon_added, 20.0, 0.7, 1, 1.0};
  CHECK(success_probability(ps) == Approx(addition_probability(20.0, 0.7, 1)).epsilon(1e-15));
  CHECK(success_probability(pa) == Approx(addition_probability(20.0, 0.7, 1)).epsilon(1e-15));
  CHECK(success_probability(SourceParams{Scheme::photon_added, 20.0, 0.7, 1, 0.5}) ==
        Approx(0.5 * addition_probability(20.0, 0.7, 1)).epsilon(1e-15));
  CHECK(scheme_name(Scheme::photon_added) == "T-PA");
  CHECK(parse_scheme("T-PS") == Scheme::photon_subtracted);
  CHECK_THROWS_AS(parse_scheme("PSS"), DomainError);
}

TEST_CASE("Fock kets") {
  SUBCASE("TMSV") {
    const auto ket = fock_ket(SourceParams::tmsv(1.0), 80);
    for (int n = 0; n < 10; ++n) {
      CHECK(ket.amplitude(n, n) == Approx(std::sqrt(0.5) * std::pow(std::sqrt(0.5), n)).epsilon(1e-13));
      CHECK(ket.amplitude(n, n + 1) == 0.0);
    }
    CHECK(ket.norm_sq() == Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("heralded kets are normalized with the documented support") {
    const auto ps = fock_ket({Scheme::photon_subtracted, 3.0, 0.7, 1, 1.0});
    CHECK(ps.norm_sq() == Approx(1.0).epsilon(1e-10));
    for (const auto& [k, v] : ps.coefficients) CHECK(k.first == k.second + 1);
    const auto pa = fock_ket({Scheme::photon_added, 2.0, 0.7, 1, 1.0});
    CHECK(pa.norm_sq() == Approx(1.0).epsilon(1e-10));
    double nb = 0.0;
    for (const auto& [k, v] : pa.coefficients) {
      CHECK(k.second == k.first + 1);
      nb += k.second * v * v;
    }
    CHECK(nb == Approx((pas_cm(2.0, 0.7, 1).mode_b - 1.0) / 2.0).epsilon(1e-10));
  }
  SUBCASE("oracle covariance matches the closed forms") {
    const auto vac = oracle_cm_from_fock(fock_ket(SourceParams::tmsv(0.0)));
    CHECK(vac.mode_a == Approx(1.0).epsilon(1e-12));
    CHECK(vac.corr == Approx(0.0).scale(1.0).epsilon(1e-12));
    const auto t3 = oracle_cm_from_fock(fock_ket(SourceParams::tmsv(3.0)));
    CHECK(t3.mode_a == Approx(7.0).epsilon(1e-8));
    CHECK(t3.corr == Approx(tmsv_cm(3.0).corr).epsilon(1e-8));
    for (double a2 : {1.0, 5.0, 20.0}) {
      for (double ts : {0.5, 0.7, 0.9}) {
        for (int n = 0; n <= 3; ++n) {
          for (Scheme s : {Scheme::photon_subtracted, Scheme::photon_added}) {
            const SourceParams p{s, a2, ts, n, 1.0};
            const auto o = oracle_cm_from_fock(fock_ket(p));
            const auto c = source_cm(p);
            CHECK(o.mode_a == Approx(c.mode_a).epsilon(1e-8));
            CHECK(o.mode_b == Approx(c.mode_b).epsilon(1e-8));
            CHECK(o.corr == Approx(c.corr).epsilon(1e-8));
          }
        }
      }
    }
    const auto big = oracle_cm_from_fock(fock_ket({Scheme::photon_subtracted, 20.0, 0.7, 3, 1.0}, 200));
    CHECK(big.mode_a == Approx(pss_cm(20.0, 0.7, 3).mode_a).epsilon(1e-8));
  }
  CHECK_THROWS_AS(fock_ket({Scheme::photon_subtracted, 20.0, 0.7, 1, 1.0}, 10), NumericalError);
  CHECK_THROWS_AS(fock_ket({Scheme::photon_added, 2.0, 1.0, 1, 1.0}), DomainError);
}
