#pragma once

#include <cstdint>
#include <vector>

#include "gutmanlab/distribution.hpp"

namespace gutmanlab {

struct ExponentSolution {
  double value = 0.0;
  std::vector<Distribution> minimizers;
  // Lagrange multiplier of the active divergence constraint. +infinity at
  // lambda = 0, where the constraint gradient vanishes at the optimum and the
  // dual is attained only in the limit.
  double multiplier = 0.0;
  bool converged = true;
  // max of the constraint residual and the final inner fixed-point delta.
  double residual = 0.0;
};

// Smallest attainable alpha*D(q1||p1) + D(q2||p2) over pairs (q1, q2) with
// gjs_divergence(q1, q2, alpha) <= lambda. Zero (with minimizers (p1, p2))
// once lambda reaches gjs_divergence(p1, p2, alpha); at lambda = 0 the two
// minimizers coincide with the tilted distribution of order alpha/(1+alpha).
ExponentSolution error_exponent(const Distribution& p1, const Distribution& p2,
                                double alpha, double lambda);

// Smallest D(q1||pj) + alpha*D(q2||pi) + alpha*D(q3||pk) subject to
// gjs_divergence(q2, q1, alpha) <= lambda and gjs_divergence(q3, q1, alpha)
// <= lambda. At lambda = 0 this equals the triple divergence of order
// 2*alpha/(1+2*alpha).
ExponentSolution rejection_exponent(const Distribution& pj, const Distribution& pi,
                                    const Distribution& pk, double alpha, double lambda);

// Exact minimum of the error_exponent objective over the lattice of
// empirical types of lengths N = ceil(alpha*n) and n. Refuses (domain error)
// when (N+1)^(K-1) * (n+1)^(K-1) exceeds 1e8.
ExponentSolution error_exponent_on_types(const Distribution& p1, const Distribution& p2,
                                         double alpha, double lambda, std::uint64_t n);

// Exhaustive reference scans over Bernoulli parameters, step-spaced grids.
// These are deliberately brute force and independent of the solvers above;
// binary alphabets only.
double error_exponent_bernoulli_grid(const Distribution& p1, const Distribution& p2,
                                     double alpha, double lambda, double step);
double rejection_exponent_bernoulli_grid(const Distribution& pj, const Distribution& pi,
                                         const Distribution& pk, double alpha,
                                         double lambda, double step);

// Finite-sample slack terms appearing in the threshold and converse bounds.
// All vanish as n grows for fixed alpha, alphabet size and hypothesis count.
struct SlackTerms {
  double typicality = 0.0;            // mass outside the typical sets
  double berry_esseen = 0.0;          // normal-approximation + typicality slack
  double converse_binary = 0.0;       // type-counting slack, binary converse
  double converse_multi = 0.0;        // type-counting slack, M-ary converse
  double threshold_correction = 0.0;  // |X| log((1+alpha) n + 1) / n
};

SlackTerms slack_terms(std::uint64_t n, double alpha, std::size_t alphabet_size,
                       std::size_t num_hypotheses, const Distribution& p1,
                       const Distribution& p2);

}  // namespace gutmanlab
