#pragma once

#include <cstddef>

namespace gutmanlab {

// A probability value. Construction rejects values outside [0, 1]; values
// within 1e-12 of the boundary are clamped onto it.
class Probability {
 public:
  Probability() = default;
  explicit Probability(double v);
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

// Standard normal cdf. Throws std::domain_error on non-finite input.
Probability std_normal_cdf(double x);

// Complementary cdf, defined as 1 - std_normal_cdf(x) exactly as computed.
Probability std_normal_sf(double x);

// Inverse of the standard normal cdf for p in (0, 1). Rational approximation
// refined by one Newton step; absolute error below 1e-10 on (1e-10, 1-1e-10).
double std_normal_inv_cdf(Probability p);

// Complementary cdf of a chi-squared variable with dof >= 1 degrees of
// freedom, via the regularized upper incomplete gamma function.
Probability chi2_sf(unsigned dof, double x);

// Inverse of chi2_sf in x, for p in (0, 1).
double chi2_isf(unsigned dof, Probability p);

}  // namespace gutmanlab
