#include "gutmanlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gutmanlab {
namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Acklam's rational approximation to the normal quantile (relative error
// ~1.15e-9), used as the seed for one Newton refinement.
double inv_cdf_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Regularized lower incomplete gamma P(a, x) by its power series, for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction,
// for x >= a+1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace

Probability::Probability(double v) {
  if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
    throw std::domain_error("probability outside [0, 1]: " + std::to_string(v));
  }
  value_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

Probability std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite input");
  return Probability(0.5 * std::erfc(-x / kSqrt2));
}

Probability std_normal_sf(double x) {
  return Probability(1.0 - std_normal_cdf(x).value());
}

double std_normal_inv_cdf(Probability p) {
  double pv = p.value();
  if (!(pv > 0.0 && pv < 1.0)) {
    throw std::domain_error("std_normal_inv_cdf: p must lie strictly in (0, 1)");
  }
  double x = inv_cdf_seed(pv);
  double err = std_normal_cdf(x).value() - pv;
  x -= err / std_normal_pdf(x);
  return x;
}

Probability chi2_sf(unsigned dof, double x) {
  if (dof == 0) throw std::domain_error("chi2_sf: degrees of freedom must be >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::domain_error("chi2_sf: x must be finite and nonnegative");
  }
  return Probability(gamma_q(0.5 * dof, 0.5 * x));
}

double chi2_isf(unsigned dof, Probability p) {
  double pv = p.value();
  if (dof == 0) throw std::domain_error("chi2_isf: degrees of freedom must be >= 1");
  if (!(pv > 0.0 && pv < 1.0)) {
    throw std::domain_error("chi2_isf: p must lie strictly in (0, 1)");
  }
  double hi = 1.0;
  while (chi2_sf(dof, hi).value() > pv) {
    hi *= 2.0;
    if (hi > 1e30) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi2_sf(dof, mid).value() > pv) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gutmanlab
