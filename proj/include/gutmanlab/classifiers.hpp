#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gutmanlab/distribution.hpp"
#include "gutmanlab/special_functions.hpp"

namespace gutmanlab {

// Outcome of a decision rule. Hypothesis indices are 1-based; 0 means the
// rejection option was taken. Only rejection-capable rules emit 0.
struct Verdict {
  int decision = 0;
  bool tie_broken = false;       // argmin tie resolved to the smallest index
  bool length_mismatch = false;  // training length differs from ceil(alpha*n)

  bool rejected() const { return decision == 0; }
  static Verdict hypothesis(int j) { return Verdict{j, false, false}; }
  static Verdict reject() { return Verdict{0, false, false}; }
};

enum class ThresholdMode { second_order, gutman_corrected, chi2_dual, explicit_value };

// Configuration of a classification experiment: hypothesis count, length
// ratio, alphabet, how the threshold is chosen and the target levels.
// explicit_lambda must be present exactly when the mode is explicit_value.
struct ClassifierSpec {
  std::size_t num_hypotheses = 2;
  double alpha = 1.0;
  std::size_t alphabet_size = 2;
  ThresholdMode mode = ThresholdMode::second_order;
  std::vector<double> epsilons;
  std::optional<double> explicit_lambda;

  void validate() const;  // throws std::domain_error on violations
};

// Threshold the configuration selects at test length n, for the binary
// rules. second_order and gutman_corrected consume (p1, p2); chi2_dual only
// the alphabet; explicit_value returns the stored value.
double resolve_threshold(const ClassifierSpec& spec, const Distribution& p1,
                         const Distribution& p2, std::uint64_t n);

// Second-order threshold gjs + sqrt(V/n) * PhiInv(epsilon), clamped at 0.
// Requires p1 != p2 (positive dispersion) and n >= 2.
double threshold_second_order(const Distribution& p1, const Distribution& p2,
                              double alpha, std::uint64_t n, Probability epsilon);

// lambda - |X| log((1+alpha) n + 1) / n; may be negative.
double threshold_gutman_corrected(double lambda, std::uint64_t n, double alpha,
                                  std::size_t alphabet_size);

// Chi-squared calibration for the dual regime: isf_{|X|-1}(epsilon) / (2n).
double threshold_chi2_dual(std::uint64_t n, std::size_t alphabet_size,
                           Probability epsilon);

// Structure of an M-tuple of training distributions: per-hypothesis closest
// competitor, and the argmin sets over first- and second-order terms.
struct MultiStructure {
  std::vector<double> min_gjs;           // smallest competitor divergence per j
  std::vector<int> closest;              // its index i*(j), 1-based
  std::vector<int> first_order_argmin;   // 1-based hypothesis indices
  std::vector<int> second_order_argmin;  // subset of the above
};

// Requires pairwise-distinct distributions and, per hypothesis, a unique
// closest competitor (ties within 1e-12 raise a domain error).
MultiStructure multi_structure(const std::vector<Distribution>& p, double alpha,
                               const std::vector<double>& epsilons);

// min over j of the directed second-order threshold toward hypothesis j.
double multi_threshold(const std::vector<Distribution>& p, double alpha,
                       std::uint64_t n, const std::vector<double>& epsilons);

// Binary test on marginal types: H1 iff the divergence between the first
// training type and the test type is <= lambda. lambda may be negative, in
// which case H2 is returned always.
Verdict gutman_binary_classify(const Sequence& x1, const Sequence& y, double alpha,
                               double lambda, std::size_t alphabet_size = 0);
// The second training sequence is accepted for interface symmetry; the rule
// never reads it.
Verdict gutman_binary_classify(const Sequence& x1, const Sequence& x2,
                               const Sequence& y, double alpha, double lambda,
                               std::size_t alphabet_size = 0);
Verdict gutman_binary_from_types(const EmpiricalType& tx1, const EmpiricalType& ty,
                                 double alpha, double lambda);

// M-ary test with rejection: accept the hypothesis with the smallest
// training-vs-test divergence when the second smallest clears lambda_tilde,
// otherwise reject.
Verdict unnikrishnan_classify(const std::vector<Sequence>& xs, const Sequence& y,
                              double alpha, double lambda_tilde,
                              std::size_t alphabet_size = 0);
Verdict unnikrishnan_from_stats(std::span<const double> gjs_values, double lambda_tilde);

// M-ary max-over-others test with rejection: H_j when g_j is the only value
// at or below lambda (the H1 clause does not examine g_1); reject when two or
// more values are at or below lambda.
Verdict gutman_multi_classify(const std::vector<Sequence>& xs, const Sequence& y,
                              double alpha, double lambda,
                              std::size_t alphabet_size = 0);
Verdict gutman_multi_from_stats(std::span<const double> gjs_values, double lambda);

// Binary test with rejection and per-hypothesis thresholds, clauses evaluated
// in order: H1 when g2 > lambda2; H2 when g1 > lambda1 and g2 <= lambda2;
// reject when both are at or below their thresholds.
Verdict binary_reject_classify(const Sequence& x1, const Sequence& x2,
                               const Sequence& y, double alpha, double lambda1,
                               double lambda2, std::size_t alphabet_size = 0);
Verdict binary_reject_from_stats(double g1, double g2, double lambda1, double lambda2);

// Membership test for the achievable second-order pair region:
//   Phi(l1 / sqrt(V(p1,p2,alpha))) + Phi(l2 / sqrt(V(p2,p1,alpha))) <= epsilon.
// Accepts any real (l1, l2); both directed dispersions must be positive.
bool second_order_region_check(double l1, double l2, const Distribution& p1,
                               const Distribution& p2, double alpha,
                               Probability epsilon);

}  // namespace gutmanlab
