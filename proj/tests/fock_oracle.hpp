// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <utility>

#include "cvqkd/states.hpp"

namespace fock_oracle {

// Brute-force heralded state: TMSV on (A, B), mode B mixed with ancilla |k>_C
// on a beam splitter of transmissivity ts (b -> sqrt(ts) b - sqrt(1-ts) c,
// c -> sqrt(1-ts) b + sqrt(ts) c), then C projected on |m>. Amplitudes are
// expanded term by term from the two binomials.
struct Heralded {
  std::map<std::pair<int, int>, double> amp;  // unnormalized
  double probability = 0.0;
};

inline double log_binomial(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

inline Heralded herald(double alpha2, double ts, int ancilla, int outcome, int n_max) {
  const double lam2 = alpha2 / (1.0 + alpha2);
  Heralded h;
  for (int n = 0; n <= n_max; ++n) {
    const double log_c = 0.5 * std::log1p(-lam2) + 0.5 * n * std::log(lam2);
    // |n>_B |ancilla>_C -> sum over i (from b^n) and j (from c^ancilla) of
    // C(n,i) C(k,j) sqrt(ts)^(n-i) (-sqrt(1-ts))^i sqrt(1-ts)^(k-j) sqrt(ts)^j
    //   b^(n-i+k-j) c^(i+j) / sqrt(n! k!)
    for (int i = 0; i <= n; ++i) {
      const int j = outcome - i;
      if (j < 0 || j > ancilla) continue;
      const int nb = n - i + ancilla - j;
      double log_mag = log_binomial(n, i) + log_binomial(ancilla, j);
      if (n - i + j > 0) log_mag += 0.5 * (n - i + j) * std::log(ts);
      if (i + ancilla - j > 0) log_mag += 0.5 * (i + ancilla - j) * std::log1p(-ts);
      log_mag += 0.5 * (std::lgamma(nb + 1.0) + std::lgamma(outcome + 1.0) - std::lgamma(n + 1.0) -
                        std::lgamma(ancilla + 1.0));
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      h.amp[{n, nb}] += sign * std::exp(log_c + log_mag);
    }
  }
  for (const auto& [k, v] : h.amp) h.probability += v * v;
  return h;
}

// Standard-form second moments computed straight from the amplitudes.
inline cvqkd::TwoModeCM moments(const Heralded& h) {
  double na = 0, nb = 0, ab = 0;
  for (const auto& [k, v] : h.amp) {
    const double p = v * v / h.probability;
    na += k.first * p;
    nb += k.second * p;
    auto it = h.amp.find({k.first + 1, k.second + 1});
    if (it != h.amp.end()) ab += v * it->second * std::sqrt((k.first + 1.0) * (k.second + 1.0)) / h.probability;
  }
  return {1 + 2 * na, 1 + 2 * nb, 2 * std::abs(ab)};
}

inline int cutoff_for(double alpha2) {
  return static_cast<int>(std::ceil(40.0 / -std::log(alpha2 / (1.0 + alpha2)))) + 10;
}

}  // namespace fock_oracle
