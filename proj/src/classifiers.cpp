#include "gutmanlab/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gutmanlab/divergences.hpp"

namespace gutmanlab {
namespace {

constexpr double kTieTol = 1e-12;

std::size_t infer_alphabet(std::size_t requested, std::initializer_list<const Sequence*> seqs) {
  if (requested >= 2) return requested;
  std::uint32_t max_symbol = 0;
  for (const Sequence* s : seqs) {
    for (std::uint32_t v : *s) max_symbol = std::max(max_symbol, v);
  }
  return std::max<std::size_t>(2, max_symbol + 1);
}

void check_nonempty(std::initializer_list<const Sequence*> seqs) {
  for (const Sequence* s : seqs) {
    if (s->empty()) throw std::domain_error("classify: empty sequence");
  }
}

bool training_length_matches(std::uint64_t train_len, std::uint64_t test_len,
                             double alpha) {
  return train_len == training_length(test_len, alpha);
}

}  // namespace

void ClassifierSpec::validate() const {
  if (num_hypotheses < 2) {
    throw std::domain_error("ClassifierSpec: need at least two hypotheses");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("ClassifierSpec: alpha must be finite and positive");
  }
  if (alphabet_size < 2) {
    throw std::domain_error("ClassifierSpec: alphabet size must be >= 2");
  }
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) {
      throw std::domain_error("ClassifierSpec: targets must lie in (0, 1)");
    }
  }
  if (mode == ThresholdMode::explicit_value) {
    if (!explicit_lambda.has_value()) {
      throw std::domain_error("ClassifierSpec: explicit mode needs explicit_lambda");
    }
  } else if (explicit_lambda.has_value()) {
    throw std::domain_error(
        "ClassifierSpec: explicit_lambda is only valid in explicit mode");
  } else if (epsilons.empty()) {
    throw std::domain_error("ClassifierSpec: target-driven modes need epsilons");
  }
}

double resolve_threshold(const ClassifierSpec& spec, const Distribution& p1,
                         const Distribution& p2, std::uint64_t n) {
  spec.validate();
  switch (spec.mode) {
    case ThresholdMode::explicit_value:
      return *spec.explicit_lambda;
    case ThresholdMode::second_order:
      return threshold_second_order(p1, p2, spec.alpha, n,
                                    Probability(spec.epsilons.front()));
    case ThresholdMode::gutman_corrected:
      return threshold_gutman_corrected(
          threshold_second_order(p1, p2, spec.alpha, n,
                                 Probability(spec.epsilons.front())),
          n, spec.alpha, spec.alphabet_size);
    case ThresholdMode::chi2_dual:
      return threshold_chi2_dual(n, spec.alphabet_size,
                                 Probability(spec.epsilons.front()));
  }
  throw std::domain_error("ClassifierSpec: unknown threshold mode");
}

double threshold_second_order(const Distribution& p1, const Distribution& p2,
                              double alpha, std::uint64_t n, Probability epsilon) {
  if (n < 2) throw std::domain_error("threshold_second_order: n must be >= 2");
  double v = dispersion(p1, p2, alpha);
  if (v <= 0.0) {
    throw std::domain_error(
        "threshold_second_order: zero dispersion (distributions must differ)");
  }
  double lambda = gjs_divergence(p1, p2, alpha) +
                  std::sqrt(v / static_cast<double>(n)) * std_normal_inv_cdf(epsilon);
  return lambda < 0.0 ? 0.0 : lambda;
}

double threshold_gutman_corrected(double lambda, std::uint64_t n, double alpha,
                                  std::size_t alphabet_size) {
  if (n == 0) throw std::domain_error("threshold_gutman_corrected: n must be positive");
  double nn = static_cast<double>(n);
  return lambda - static_cast<double>(alphabet_size) *
                      std::log((1.0 + alpha) * nn + 1.0) / nn;
}

double threshold_chi2_dual(std::uint64_t n, std::size_t alphabet_size,
                           Probability epsilon) {
  if (n == 0) throw std::domain_error("threshold_chi2_dual: n must be positive");
  if (alphabet_size < 2) {
    throw std::domain_error("threshold_chi2_dual: alphabet size must be >= 2");
  }
  return chi2_isf(static_cast<unsigned>(alphabet_size - 1), epsilon) /
         (2.0 * static_cast<double>(n));
}

MultiStructure multi_structure(const std::vector<Distribution>& p, double alpha,
                               const std::vector<double>& epsilons) {
  std::size_t m = p.size();
  if (m < 2) throw std::domain_error("multi_structure: need at least two hypotheses");
  if (epsilons.size() != m) {
    throw std::domain_error("multi_structure: epsilon vector size mismatch");
  }
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) {
      throw std::domain_error("multi_structure: epsilons must lie in (0, 1)");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (p[i] == p[j]) {
        throw std::domain_error("multi_structure: distributions must be distinct");
      }
    }
  }

  MultiStructure s;
  s.min_gjs.resize(m);
  s.closest.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      double g = gjs_divergence(p[i], p[j], alpha);
      if (g < best) {
        second = best;
        best = g;
        best_i = i;
      } else if (g < second) {
        second = g;
      }
    }
    if (m > 2 && second - best <= kTieTol) {
      throw std::domain_error(
          "multi_structure: closest-competitor uniqueness assumption violated for "
          "hypothesis " +
          std::to_string(j + 1));
    }
    s.min_gjs[j] = best;
    s.closest[j] = static_cast<int>(best_i) + 1;
  }

  double theta_min = *std::min_element(s.min_gjs.begin(), s.min_gjs.end());
  for (std::size_t j = 0; j < m; ++j) {
    if (s.min_gjs[j] <= theta_min + kTieTol) {
      s.first_order_argmin.push_back(static_cast<int>(j) + 1);
    }
  }

  double second_min = std::numeric_limits<double>::infinity();
  std::vector<double> second_term(m, 0.0);
  for (int j1 : s.first_order_argmin) {
    std::size_t j = static_cast<std::size_t>(j1 - 1);
    std::size_t i = static_cast<std::size_t>(s.closest[j] - 1);
    second_term[j] = std::sqrt(dispersion(p[i], p[j], alpha)) *
                     std_normal_inv_cdf(Probability(epsilons[j]));
    second_min = std::min(second_min, second_term[j]);
  }
  for (int j1 : s.first_order_argmin) {
    std::size_t j = static_cast<std::size_t>(j1 - 1);
    if (second_term[j] <= second_min + kTieTol) s.second_order_argmin.push_back(j1);
  }
  return s;
}

double multi_threshold(const std::vector<Distribution>& p, double alpha,
                       std::uint64_t n, const std::vector<double>& epsilons) {
  if (n < 2) throw std::domain_error("multi_threshold: n must be >= 2");
  MultiStructure s = multi_structure(p, alpha, epsilons);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.size(); ++j) {
    std::size_t i = static_cast<std::size_t>(s.closest[j] - 1);
    double v = dispersion(p[i], p[j], alpha);
    double t = s.min_gjs[j] + std::sqrt(v / static_cast<double>(n)) *
                                  std_normal_inv_cdf(Probability(epsilons[j]));
    best = std::min(best, t);
  }
  return best < 0.0 ? 0.0 : best;
}

Verdict gutman_binary_from_types(const EmpiricalType& tx1, const EmpiricalType& ty,
                                 double alpha, double lambda) {
  double g = gjs_from_counts(tx1.counts, tx1.length, ty.counts, ty.length, alpha);
  return g <= lambda ? Verdict::hypothesis(1) : Verdict::hypothesis(2);
}

Verdict gutman_binary_classify(const Sequence& x1, const Sequence& y, double alpha,
                               double lambda, std::size_t alphabet_size) {
  check_nonempty({&x1, &y});
  std::size_t k = infer_alphabet(alphabet_size, {&x1, &y});
  Verdict v = gutman_binary_from_types(empirical_type(x1, k), empirical_type(y, k),
                                       alpha, lambda);
  v.length_mismatch = !training_length_matches(x1.size(), y.size(), alpha);
  return v;
}

Verdict gutman_binary_classify(const Sequence& x1, const Sequence& /*x2*/,
                               const Sequence& y, double alpha, double lambda,
                               std::size_t alphabet_size) {
  return gutman_binary_classify(x1, y, alpha, lambda, alphabet_size);
}

Verdict unnikrishnan_from_stats(std::span<const double> gjs_values,
                                double lambda_tilde) {
  if (gjs_values.size() < 2) {
    throw std::domain_error("unnikrishnan: need at least two hypotheses");
  }
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 1; i < gjs_values.size(); ++i) {
    if (gjs_values[i] < gjs_values[best]) {
      best = i;
      tie = false;
    } else if (gjs_values[i] == gjs_values[best]) {
      tie = true;  // smallest index kept
    }
  }
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gjs_values.size(); ++i) {
    if (i != best) second = std::min(second, gjs_values[i]);
  }
  Verdict v = second >= lambda_tilde ? Verdict::hypothesis(static_cast<int>(best) + 1)
                                     : Verdict::reject();
  v.tie_broken = tie;
  return v;
}

namespace {

std::vector<double> gjs_stats(const std::vector<Sequence>& xs, const Sequence& y,
                              double alpha, std::size_t alphabet_size) {
  if (xs.size() < 2) throw std::domain_error("classify: need at least two hypotheses");
  if (y.empty()) throw std::domain_error("classify: empty sequence");
  std::size_t k = alphabet_size;
  if (k < 2) {
    std::uint32_t max_symbol = 0;
    for (const Sequence& s : xs) {
      for (std::uint32_t v : s) max_symbol = std::max(max_symbol, v);
    }
    for (std::uint32_t v : y) max_symbol = std::max(max_symbol, v);
    k = std::max<std::size_t>(2, max_symbol + 1);
  }
  EmpiricalType ty = empirical_type(y, k);
  std::vector<double> g;
  g.reserve(xs.size());
  for (const Sequence& x : xs) {
    if (x.empty()) throw std::domain_error("classify: empty sequence");
    EmpiricalType tx = empirical_type(x, k);
    g.push_back(gjs_from_counts(tx.counts, tx.length, ty.counts, ty.length, alpha));
  }
  return g;
}

bool lengths_match(const std::vector<Sequence>& xs, const Sequence& y, double alpha) {
  std::uint64_t want = training_length(y.size(), alpha);
  for (const Sequence& x : xs) {
    if (x.size() != want) return false;
  }
  return true;
}

}  // namespace

Verdict unnikrishnan_classify(const std::vector<Sequence>& xs, const Sequence& y,
                              double alpha, double lambda_tilde,
                              std::size_t alphabet_size) {
  Verdict v = unnikrishnan_from_stats(gjs_stats(xs, y, alpha, alphabet_size),
                                      lambda_tilde);
  v.length_mismatch = !lengths_match(xs, y, alpha);
  return v;
}

Verdict gutman_multi_from_stats(std::span<const double> gjs_values, double lambda) {
  std::size_t m = gjs_values.size();
  if (m < 2) throw std::domain_error("gutman_multi: need at least two hypotheses");
  // H_j requires every other statistic to exceed lambda; j = 1 additionally
  // fires without examining g_1. The clauses are mutually exclusive, so the
  // scan order is immaterial; reject otherwise.
  for (std::size_t j = 0; j < m; ++j) {
    bool others_exceed = true;
    for (std::size_t i = 0; i < m && others_exceed; ++i) {
      if (i != j && gjs_values[i] <= lambda) others_exceed = false;
    }
    if (!others_exceed) continue;
    if (j == 0 || gjs_values[j] <= lambda) {
      return Verdict::hypothesis(static_cast<int>(j) + 1);
    }
  }
  return Verdict::reject();
}

Verdict gutman_multi_classify(const std::vector<Sequence>& xs, const Sequence& y,
                              double alpha, double lambda, std::size_t alphabet_size) {
  Verdict v = gutman_multi_from_stats(gjs_stats(xs, y, alpha, alphabet_size), lambda);
  v.length_mismatch = !lengths_match(xs, y, alpha);
  return v;
}

Verdict binary_reject_from_stats(double g1, double g2, double lambda1, double lambda2) {
  if (g2 > lambda2) return Verdict::hypothesis(1);
  if (g1 > lambda1) return Verdict::hypothesis(2);
  return Verdict::reject();
}

Verdict binary_reject_classify(const Sequence& x1, const Sequence& x2,
                               const Sequence& y, double alpha, double lambda1,
                               double lambda2, std::size_t alphabet_size) {
  check_nonempty({&x1, &x2, &y});
  std::size_t k = infer_alphabet(alphabet_size, {&x1, &x2, &y});
  EmpiricalType ty = empirical_type(y, k);
  EmpiricalType t1 = empirical_type(x1, k);
  EmpiricalType t2 = empirical_type(x2, k);
  double g1 = gjs_from_counts(t1.counts, t1.length, ty.counts, ty.length, alpha);
  double g2 = gjs_from_counts(t2.counts, t2.length, ty.counts, ty.length, alpha);
  Verdict v = binary_reject_from_stats(g1, g2, lambda1, lambda2);
  v.length_mismatch = !lengths_match({x1, x2}, y, alpha);
  return v;
}

bool second_order_region_check(double l1, double l2, const Distribution& p1,
                               const Distribution& p2, double alpha,
                               Probability epsilon) {
  double v12 = dispersion(p1, p2, alpha);
  double v21 = dispersion(p2, p1, alpha);
  if (v12 <= 0.0 || v21 <= 0.0) {
    throw std::domain_error("second_order_region_check: zero dispersion");
  }
  double sum = std_normal_cdf(l1 / std::sqrt(v12)).value() +
               std_normal_cdf(l2 / std::sqrt(v21)).value();
  return sum <= epsilon.value();
}

}  // namespace gutmanlab
