#pragma once

// Reference oracles for the test suite. Everything here is implemented from
// first principles (series, continued fractions, bisection) and stays
// independent of the library code paths it checks.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace reference {

// Maclaurin series for erf, accurate to ~1e-16 for |x| <= 3.5.
inline double erf_series(double x) {
  double term = x;
  double sum = x;
  double x2 = x * x;
  for (int k = 1; k < 200; ++k) {
    term *= -x2 / k;
    double add = term / (2 * k + 1);
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
  }
  return sum * 2.0 / std::sqrt(std::acos(-1.0));
}

// Lentz continued fraction for erfc, for x > 0:
//   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
inline double erfc_cf(double x) {
  const double tiny = 1e-300;
  double c = 1.0 / tiny;
  double d = 1.0 / x;
  double h = d;
  for (int i = 1; i <= 300; ++i) {
    double an = 0.5 * i;
    d = x + an * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = x + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) / std::sqrt(std::acos(-1.0)) * h;
}

inline double erf(double x) {
  if (x < 0.0) return -erf(-x);
  if (x <= 3.5) return erf_series(x);
  return 1.0 - erfc_cf(x);
}

inline double erfc(double x) {
  if (x > 3.5) return erfc_cf(x);
  return 1.0 - erf(x);
}

inline double normal_cdf(double x) {
  double z = x / std::sqrt(2.0);
  if (z < -4.0) return 0.5 * erfc_cf(-z);
  if (z > 4.0) return 1.0 - 0.5 * erfc_cf(z);
  return 0.5 * (1.0 + erf(z));
}

inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Interior points of the probability simplex; entries at least
// 0.1 / alphabet_size. Deterministic given the engine state.
inline std::vector<double> interior_simplex_point(std::size_t alphabet_size,
                                                  std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(alphabet_size);
  double sum = 0.0;
  for (double& v : p) {
    v = expo(rng);
    sum += v;
  }
  double floor = 0.1 / static_cast<double>(alphabet_size);
  double rescale = 1.0 - floor * static_cast<double>(alphabet_size);
  double total = 0.0;
  for (double& v : p) {
    v = floor + rescale * v / sum;
    total += v;
  }
  p.back() += 1.0 - total;
  return p;
}

}  // namespace reference
