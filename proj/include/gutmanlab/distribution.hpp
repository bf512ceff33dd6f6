#pragma once

#include <cstdint>
#include <vector>

namespace gutmanlab {

// Probability vector over the alphabet [0 : K-1], K >= 2. Entries are
// nonnegative and sum to 1 within 1e-12. Immutable after construction.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  // Two-symbol distribution with P(1) = p.
  static Distribution bernoulli(double p);
  static Distribution point_mass(std::size_t symbol, std::size_t alphabet_size);

  std::size_t alphabet_size() const { return probs_.size(); }
  double operator[](std::size_t x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const Distribution& other) const { return probs_ == other.probs_; }

 private:
  std::vector<double> probs_;
};

// Symbol counts of a length-n sequence; counts sum to n.
struct EmpiricalType {
  std::vector<std::uint64_t> counts;
  std::uint64_t length = 0;

  EmpiricalType(std::vector<std::uint64_t> c, std::uint64_t n);

  double frequency(std::size_t x) const {
    return static_cast<double>(counts[x]) / static_cast<double>(length);
  }
  Distribution as_distribution() const;
};

using Sequence = std::vector<std::uint32_t>;

// Counts each symbol of a nonempty sequence over [0 : alphabet_size-1].
EmpiricalType empirical_type(const Sequence& seq, std::size_t alphabet_size);

// Entrywise (alpha * p1 + p2) / (1 + alpha); alpha = 0 returns p2.
Distribution mixture(const Distribution& p1, const Distribution& p2, double alpha);

// True iff max_x |t(x) - p(x)| <= sqrt(log(n) / n), natural log. Requires
// n >= 2 and t.length == n.
bool in_typical_set(const EmpiricalType& t, const Distribution& p, std::uint64_t n);

// Training-sequence length N = ceil(alpha * n).
std::uint64_t training_length(std::uint64_t n, double alpha);

}  // namespace gutmanlab
