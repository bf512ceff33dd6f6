#include "gutmanlab/random.hpp"

#include <stdexcept>

namespace gutmanlab {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint32_t draw_symbol(const std::vector<double>& cumulative, double u) {
  // cumulative has one entry per symbol; the last entry is 1.
  std::size_t x = 0;
  while (x + 1 < cumulative.size() && u >= cumulative[x]) ++x;
  return static_cast<std::uint32_t>(x);
}

std::vector<double> cumulative_probs(const Distribution& dist) {
  std::vector<double> cum(dist.alphabet_size());
  double acc = 0.0;
  for (std::size_t x = 0; x < cum.size(); ++x) {
    acc += dist[x];
    cum[x] = acc;
  }
  cum.back() = 1.0;
  return cum;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t RandomStream::next_u64() {
  std::uint64_t z = key_ + (++counter_) * kGolden;
  return mix64(z);
}

double RandomStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Sequence sample(const Distribution& dist, std::uint64_t n, RandomStream& stream) {
  if (n == 0) throw std::domain_error("sample: n must be positive");
  std::vector<double> cum = cumulative_probs(dist);
  Sequence seq(n);
  for (std::uint64_t i = 0; i < n; ++i) seq[i] = draw_symbol(cum, stream.next_unit());
  return seq;
}

std::vector<std::uint64_t> sample_counts(const Distribution& dist, std::uint64_t n,
                                         RandomStream& stream) {
  std::vector<std::uint64_t> counts;
  sample_counts_into(dist, n, stream, counts);
  return counts;
}

void sample_counts_into(const Distribution& dist, std::uint64_t n, RandomStream& stream,
                        std::vector<std::uint64_t>& counts) {
  if (n == 0) throw std::domain_error("sample_counts: n must be positive");
  counts.assign(dist.alphabet_size(), 0);
  if (dist.alphabet_size() == 2) {
    // Hot path for binary alphabets: one threshold compare per draw.
    double p0 = dist[0];
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < n; ++i) ones += stream.next_unit() >= p0 ? 1 : 0;
    counts[0] = n - ones;
    counts[1] = ones;
    return;
  }
  std::vector<double> cum = cumulative_probs(dist);
  for (std::uint64_t i = 0; i < n; ++i) ++counts[draw_symbol(cum, stream.next_unit())];
}

}  // namespace gutmanlab
