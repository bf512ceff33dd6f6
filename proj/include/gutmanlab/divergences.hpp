#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gutmanlab/distribution.hpp"

namespace gutmanlab {

// All divergences are in nats and use the convention 0 * log(0/q) = 0.
// Support violations yield +infinity rather than NaN.

// Relative entropy D(q || p); +infinity iff supp(q) is not within supp(p).
double kl_divergence(const Distribution& q, const Distribution& p);
double kl_divergence(std::span<const double> q, std::span<const double> p);

// Generalized Jensen-Shannon divergence
//   alpha * D(p1 || m) + D(p2 || m),  m = (alpha * p1 + p2) / (1 + alpha).
// Always finite; alpha = 0 gives 0.
double gjs_divergence(const Distribution& p1, const Distribution& p2, double alpha);
double gjs_divergence(std::span<const double> p1, std::span<const double> p2, double alpha);

// The same statistic evaluated on two empirical types (no allocation).
double gjs_from_counts(std::span<const std::uint64_t> counts1, std::uint64_t n1,
                       std::span<const std::uint64_t> counts2, std::uint64_t n2,
                       double alpha);

// Largest value gjs_divergence can attain over the closure of the simplex
// pair: log(1 + alpha) + alpha * log((1 + alpha) / alpha).
double gjs_max(double alpha);

// log((1+alpha) p_i(x) / (alpha p1(x) + p2(x))) for which in {1, 2}.
// Defined only on supp(p_i); elsewhere a domain error.
double information_density(int which, std::size_t x, const Distribution& p1,
                           const Distribution& p2, double alpha);

// alpha * Var_{p1}[i1] + Var_{p2}[i2] (nats^2).
double dispersion(const Distribution& p1, const Distribution& p2, double alpha);

// alpha * E_{p1}|i1 - E i1|^3 + E_{p2}|i2 - E i2|^3 (nats^3).
double third_absolute_moment(const Distribution& p1, const Distribution& p2, double alpha);

// Renyi divergence of order gamma in (0,1) or (1,inf):
//   (gamma - 1)^{-1} log sum_x p1^gamma p2^{1-gamma}.
double renyi_divergence(double gamma, const Distribution& p1, const Distribution& p2);

// Normalized geometric mixture p1^gamma p2^{1-gamma} / Z, gamma in [0, 1].
Distribution tilted_distribution(const Distribution& p1, const Distribution& p2,
                                 double gamma);

// Divergence between three distributions, gamma in (0, 1):
//   (gamma - 1)^{-1} log sum_x pj^{1-gamma} pi^{gamma/2} pk^{gamma/2}.
double triple_divergence(double gamma, const Distribution& pj, const Distribution& pi,
                         const Distribution& pk);

// First partials of gjs_divergence with respect to the two probability
// vectors. Entries off the respective supports are excluded: value 0 and
// support mask false.
struct GjsGradient {
  std::vector<double> wrt_p1;  // alpha * i1(x) on supp(p1)
  std::vector<double> wrt_p2;  // i2(x) on supp(p2)
  std::vector<bool> p1_support;
  std::vector<bool> p2_support;
};
GjsGradient gjs_gradient(const Distribution& p1, const Distribution& p2, double alpha);

// Per-symbol second partials; the cross entry lives on supp(p1) & supp(p2).
// Off-symbol second partials vanish (the divergence is a sum over symbols).
struct GjsHessian {
  std::vector<double> wrt_p1_p1;
  std::vector<double> wrt_p2_p2;
  std::vector<double> wrt_p1_p2;
  std::vector<bool> p1_support;
  std::vector<bool> p2_support;
};
GjsHessian gjs_hessian(const Distribution& p1, const Distribution& p2, double alpha);

struct MomentPair {
  double dispersion = 0.0;    // nats^2
  double third_moment = 0.0;  // nats^3
};

// Moments of the information densities that govern comparisons between two
// candidate training distributions (p1, p2) against a common test
// distribution p3:
//   dispersion   = alpha Var_{p1}[i1(X|p1,p3)] + alpha Var_{p2}[i1(X|p2,p3)]
//                  + Var_{p3}[i2(X|p1,p3) - i2(X|p2,p3)]
//   third_moment = the matching third absolute central moments.
MomentPair pairwise_moments(const Distribution& p1, const Distribution& p2,
                            const Distribution& p3, double alpha);

}  // namespace gutmanlab
