#include "gutmanlab/distribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gutmanlab {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw std::domain_error("Distribution: alphabet size must be >= 2");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::domain_error("Distribution: entries must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::domain_error("Distribution: entries sum to " + std::to_string(sum) +
                            ", expected 1");
  }
}

Distribution Distribution::bernoulli(double p) {
  return Distribution({1.0 - p, p});
}

Distribution Distribution::point_mass(std::size_t symbol, std::size_t alphabet_size) {
  if (symbol >= alphabet_size) {
    throw std::domain_error("point_mass: symbol out of range");
  }
  std::vector<double> probs(alphabet_size, 0.0);
  probs[symbol] = 1.0;
  return Distribution(std::move(probs));
}

EmpiricalType::EmpiricalType(std::vector<std::uint64_t> c, std::uint64_t n)
    : counts(std::move(c)), length(n) {
  if (length == 0) throw std::domain_error("EmpiricalType: length must be positive");
  std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total != length) {
    throw std::domain_error("EmpiricalType: counts do not sum to the sequence length");
  }
}

Distribution EmpiricalType::as_distribution() const {
  std::vector<double> probs(counts.size());
  for (std::size_t x = 0; x < counts.size(); ++x) probs[x] = frequency(x);
  return Distribution(std::move(probs));
}

EmpiricalType empirical_type(const Sequence& seq, std::size_t alphabet_size) {
  if (seq.empty()) throw std::domain_error("empirical_type: empty sequence");
  if (alphabet_size < 2) throw std::domain_error("empirical_type: alphabet size must be >= 2");
  std::vector<std::uint64_t> counts(alphabet_size, 0);
  for (std::uint32_t s : seq) {
    if (s >= alphabet_size) {
      throw std::domain_error("empirical_type: symbol " + std::to_string(s) +
                              " out of range");
    }
    ++counts[s];
  }
  return EmpiricalType(std::move(counts), seq.size());
}

Distribution mixture(const Distribution& p1, const Distribution& p2, double alpha) {
  if (p1.alphabet_size() != p2.alphabet_size()) {
    throw std::domain_error("mixture: alphabet mismatch");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("mixture: alpha must be finite and nonnegative");
  }
  std::vector<double> probs(p1.alphabet_size());
  for (std::size_t x = 0; x < probs.size(); ++x) {
    probs[x] = (alpha * p1[x] + p2[x]) / (1.0 + alpha);
  }
  return Distribution(std::move(probs));
}

bool in_typical_set(const EmpiricalType& t, const Distribution& p, std::uint64_t n) {
  if (n < 2) throw std::domain_error("in_typical_set: n must be >= 2");
  if (t.length != n) throw std::domain_error("in_typical_set: type length differs from n");
  if (t.counts.size() != p.alphabet_size()) {
    throw std::domain_error("in_typical_set: alphabet mismatch");
  }
  double radius = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
  for (std::size_t x = 0; x < p.alphabet_size(); ++x) {
    if (std::fabs(t.frequency(x) - p[x]) > radius) return false;
  }
  return true;
}

std::uint64_t training_length(std::uint64_t n, double alpha) {
  if (n == 0) throw std::domain_error("training_length: n must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("training_length: alpha must be finite and positive");
  }
  // Nudge guards against cases like 0.1 * 30 = 3.0000000000000004.
  double scaled = alpha * static_cast<double>(n);
  return static_cast<std::uint64_t>(std::ceil(scaled - 1e-9));
}

}  // namespace gutmanlab
