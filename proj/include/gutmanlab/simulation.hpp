#pragma once

#include <cstdint>
#include <vector>

#include "gutmanlab/distribution.hpp"

namespace gutmanlab {

// Binomial-proportion estimate with stderr = sqrt(p(1-p)/trials).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate make_estimate(std::uint64_t hits, std::uint64_t trials);

struct BinaryMcReport {
  Estimate beta1;  // P(declare H2 | H1) at the given threshold
  Estimate beta2;  // P(declare H1 | H2)
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of both error probabilities of the binary type-based
// test. Per-trial counter-based streams make the result a function of
// (inputs, seed, trials) only, independent of the thread count.
BinaryMcReport mc_binary(const Distribution& p1, const Distribution& p2, double alpha,
                         std::uint64_t n, double lambda, std::uint64_t trials,
                         std::uint64_t seed, unsigned threads = 0);

struct ExactBinaryReport {
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::uint64_t enumerated_cells = 0;
};

// Exact error probabilities by summing type-class probabilities over the
// full lattice of training/test type pairs. Refuses (domain error) when the
// lattice exceeds 1e8 cells.
ExactBinaryReport exact_binary(const Distribution& p1, const Distribution& p2,
                               double alpha, std::uint64_t n, double lambda);

enum class MultiRule { unnikrishnan, gutman_multi };

struct MultiMcReport {
  std::vector<Estimate> error;      // verdict not in {H_j, reject} under H_j
  std::vector<Estimate> rejection;  // verdict = reject under H_j
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

MultiMcReport mc_multi(const std::vector<Distribution>& p, double alpha,
                       std::uint64_t n, double lambda_tilde, MultiRule rule,
                       std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

struct MaxType1Report {
  struct Point {
    double p = 0.0;
    Estimate beta1;
  };
  Estimate max_beta1;
  double argmax_p = 0.0;
  std::vector<Point> points;
  std::uint64_t trials_per_point = 0;
  std::uint64_t seed = 0;
};

// Scans Bernoulli sources Bern(p) for p on a grid of the given step and
// estimates the type-I error of the binary test at each point. Under the
// null both sequences share the source, so the scan covers every pair.
MaxType1Report max_type1_search(double alpha, std::uint64_t n, double lambda,
                                double grid_step, std::uint64_t trials_per_point,
                                std::uint64_t seed, unsigned threads = 0);

struct WeakConvergenceReport {
  double ks_distance = 0.0;
  bool degenerate = false;  // statistic identically zero (point-mass source)
  std::vector<double> samples;
};

// Samples 2n * gjs(training type, test type) with both sequences drawn from
// p, and reports the Kolmogorov-Smirnov distance to the chi-squared law with
// |X|-1 degrees of freedom.
WeakConvergenceReport weak_convergence_check(const Distribution& p, double alpha,
                                             std::uint64_t n, std::uint64_t trials,
                                             std::uint64_t seed, unsigned threads = 0);

}  // namespace gutmanlab
