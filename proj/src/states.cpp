// SPDX-License-Identifier: Apache-2.0
#include "cvqkd/states.hpp"

#include <algorithm>
#include <cmath>

#include "cvqkd/errors.hpp"

namespace cvqkd {

namespace {

// T = alpha2 / (1 + alpha2) * T_S
double effective_transmission(double alpha2, double ts) { return alpha2 / (1.0 + alpha2) * ts; }

void check_inputs(double alpha2, double ts, int photons, const char* where) {
  if (!(alpha2 >= 0.0)) throw DomainError(std::string(where) + ": alpha2 must be >= 0");
  if (!(ts > 0.0 && ts <= 1.0)) throw DomainError(std::string(where) + ": T_S must be in (0, 1]");
  if (photons < 0) throw DomainError(std::string(where) + ": N must be >= 0");
}

// a_n^2 = alpha2^n / (1 + alpha2)^(n + 1), in log form.
double log_tmsv_weight(double alpha2, int n) {
  if (n == 0) return -std::log1p(alpha2);
  return n * std::log(alpha2) - (n + 1) * std::log1p(alpha2);
}

// ln r_{n,N}^2 = ln C(n, N) + (n - N) ln T_S + N ln(1 - T_S)
double log_branch_weight(int n, int photons, double ts) {
  double value = std::lgamma(n + 1.0) - std::lgamma(photons + 1.0) - std::lgamma(n - photons + 1.0);
  if (n > photons) value += (n - photons) * std::log(ts);
  if (photons > 0) value += photons * std::log1p(-ts);
  return value;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::tmsv:
      return "TMSV";
    case Scheme::photon_subtracted:
      return "T-PS";
    case Scheme::photon_added:
      return "T-PA";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "TMSV") return Scheme::tmsv;
  if (name == "T-PS") return Scheme::photon_subtracted;
  if (name == "T-PA") return Scheme::photon_added;
  throw DomainError("unknown scheme '" + std::string(name) + "' (expected TMSV, T-PS or T-PA)");
}

void SourceParams::validate() const {
  check_inputs(alpha2, ts, photons, "SourceParams");
  if (scheme == Scheme::tmsv && photons != 0) {
    throw DomainError("SourceParams: TMSV scheme requires N = 0");
  }
  if (!(herald_efficiency > 0.0 && herald_efficiency <= 1.0)) {
    throw DomainError("SourceParams: herald efficiency must be in (0, 1]");
  }
}

CovarianceMatrix TwoModeCM::full() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 0) = m(1, 1) = mode_a;
  m(2, 2) = m(3, 3) = mode_b;
  m(0, 2) = m(2, 0) = corr;
  m(1, 3) = m(3, 1) = -corr;
  return CovarianceMatrix(std::move(m));
}

bool TwoModeCM::is_physical(double tol) const {
  return mode_a >= 1.0 - tol && mode_b >= 1.0 - tol && mode_a * mode_b - corr * corr >= 1.0 - tol;
}

TwoModeCM tmsv_cm(double alpha2) {
  if (!(alpha2 >= 0.0)) throw DomainError("tmsv_cm: alpha2 must be >= 0");
  const double v = 1.0 + 2.0 * alpha2;
  return {v, v, 2.0 * std::sqrt(alpha2 * alpha2 + alpha2)};
}

double squeezing_db(double alpha2) {
  if (!(alpha2 >= 0.0)) throw DomainError("squeezing_db: alpha2 must be >= 0");
  const double r = std::asinh(std::sqrt(alpha2));
  return -10.0 * std::log10(std::exp(-2.0 * r));
}

double subtraction_probability(double alpha2, double ts, int photons) {
  check_inputs(alpha2, ts, photons, "subtraction_probability");
  const double denom = 1.0 + alpha2 - alpha2 * ts;
  return std::pow(alpha2 * (1.0 - ts), photons) / std::pow(denom, photons + 1);
}

double addition_probability(double alpha2, double ts, int photons) {
  check_inputs(alpha2, ts, photons, "addition_probability");
  const double denom = 1.0 + alpha2 - alpha2 * ts;
  const double p = std::pow((alpha2 + 1.0) * (1.0 - ts), photons) / std::pow(denom, photons + 1);
  if (p > 1.0 + 1e-12) throw NumericalError("addition_probability: probability exceeds 1");
  return p;
}

TwoModeCM pss_cm(double alpha2, double ts, int photons) {
  check_inputs(alpha2, ts, photons, "pss_cm");
  const double t = effective_transmission(alpha2, ts);
  const double n = photons;
  return {1.0 + 2.0 * (n + t) / (1.0 - t), 1.0 + 2.0 * (n + 1.0) * t / (1.0 - t),
          2.0 * std::sqrt(t) * (n + 1.0) / (1.0 - t)};
}

TwoModeCM pas_cm(double alpha2, double ts, int photons) {
  const TwoModeCM s = pss_cm(alpha2, ts, photons);
  return {s.mode_b, s.mode_a, s.corr};
}

TwoModeCM source_cm(const SourceParams& params) {
  params.validate();
  switch (params.scheme) {
    case Scheme::tmsv:
      return tmsv_cm(params.alpha2);
    case Scheme::photon_subtracted:
      return pss_cm(params.alpha2, params.ts, params.photons);
    case Scheme::photon_added:
      return pas_cm(params.alpha2, params.ts, params.photons);
  }
  throw DomainError("source_cm: unknown scheme");
}

double success_probability(const SourceParams& params) {
  params.validate();
  if (params.scheme == Scheme::tmsv) return 1.0;
  return params.herald_efficiency * addition_probability(params.alpha2, params.ts, params.photons);
}

double FockTwoModeState::amplitude(int n_a, int n_b) const {
  const auto it = coefficients.find({n_a, n_b});
  return it == coefficients.end() ? 0.0 : it->second;
}

double FockTwoModeState::norm_sq() const {
  double sum = 0.0;
  for (const auto& [key, c] : coefficients) sum += c * c;
  return sum;
}

int default_cutoff(const SourceParams& params) {
  const double q = params.alpha2 / (1.0 + params.alpha2);
  int base = 1;
  if (q > 0.0) base = static_cast<int>(std::ceil(std::log(1e-12) / std::log(q)));
  return 2 * std::max(base, 1) + params.photons;
}

FockTwoModeState fock_ket(const SourceParams& params, int n_max) {
  params.validate();
  if (n_max < params.photons) throw DomainError("fock_ket: cutoff below N");
  FockTwoModeState state;
  state.n_max = n_max;

  const int photons = params.photons;
  if (params.scheme == Scheme::tmsv) {
    for (int n = 0; n <= n_max; ++n) {
      state.coefficients[{n, n}] = std::exp(0.5 * log_tmsv_weight(params.alpha2, n));
    }
  } else {
    // sum_n a_n r_{n+N,N} |n + N, n> (T-PS, photons added to A) or
    // |n, n + N> (T-PA, photons added to B), normalized by P_{A,N}.
    const double herald = addition_probability(params.alpha2, params.ts, photons);
    if (!(herald > 0.0)) throw DomainError("fock_ket: heralding probability is zero");
    const double log_norm = std::log(herald);
    for (int n = 0; n + photons <= n_max; ++n) {
      const double log_c2 = log_tmsv_weight(params.alpha2, n) +
                            log_branch_weight(n + photons, photons, params.ts) - log_norm;
      const double c = std::exp(0.5 * log_c2);
      if (params.scheme == Scheme::photon_subtracted) {
        state.coefficients[{n + photons, n}] = c;
      } else {
        state.coefficients[{n, n + photons}] = c;
      }
    }
  }
  state.tail = std::max(0.0, 1.0 - state.norm_sq());
  if (state.tail > 1e-10) {
    throw NumericalError("fock_ket: cutoff " + std::to_string(n_max) +
                         " too small, truncated norm " + std::to_string(state.tail));
  }
  return state;
}

FockTwoModeState fock_ket(const SourceParams& params) { return fock_ket(params, default_cutoff(params)); }

CovarianceMatrix fock_covariance(const FockTwoModeState& state) {
  double n_a = 0.0, n_b = 0.0;
  double aa = 0.0, bb = 0.0;   // <a^2>, <b^2>
  double ab = 0.0, adb = 0.0;  // <a b>, <a^dag b>
  for (const auto& [key, c] : state.coefficients) {
    const auto [na, nb] = key;
    n_a += c * c * na;
    n_b += c * c * nb;
    if (na >= 2) aa += state.amplitude(na - 2, nb) * c * std::sqrt(double(na) * (na - 1));
    if (nb >= 2) bb += state.amplitude(na, nb - 2) * c * std::sqrt(double(nb) * (nb - 1));
    if (na >= 1 && nb >= 1) ab += state.amplitude(na - 1, nb - 1) * c * std::sqrt(double(na) * nb);
    if (nb >= 1) adb += state.amplitude(na + 1, nb - 1) * c * std::sqrt(double(na + 1) * nb);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 0) = 1.0 + 2.0 * n_a + 2.0 * aa;
  m(1, 1) = 1.0 + 2.0 * n_a - 2.0 * aa;
  m(2, 2) = 1.0 + 2.0 * n_b + 2.0 * bb;
  m(3, 3) = 1.0 + 2.0 * n_b - 2.0 * bb;
  m(0, 2) = m(2, 0) = 2.0 * (ab + adb);
  m(1, 3) = m(3, 1) = 2.0 * (adb - ab);
  return CovarianceMatrix(std::move(m));
}

TwoModeCM oracle_cm_from_fock(const FockTwoModeState& state) {
  const CovarianceMatrix full = fock_covariance(state);
  const TwoModeCM cm{full(0, 0), full(2, 2), full(0, 2)};
  const double scale = std::max({1.0, cm.mode_a, cm.mode_b});
  if (std::abs(full(1, 1) - cm.mode_a) > 1e-8 * scale ||
      std::abs(full(3, 3) - cm.mode_b) > 1e-8 * scale ||
      std::abs(full(1, 3) + cm.corr) > 1e-8 * scale) {
    throw NumericalError("oracle_cm_from_fock: state is not in standard form");
  }
  return cm;
}

}  // namespace cvqkd
