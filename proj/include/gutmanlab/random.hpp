#pragma once

#include <cstdint>
#include <vector>

#include "gutmanlab/distribution.hpp"

namespace gutmanlab {

// Counter-based pseudo-random stream. A stream is fully determined by
// (seed, stream id), so per-trial streams give bit-identical results no
// matter how trials are scheduled across threads. Output is the splitmix64
// sequence started at a key mixed from seed and stream id.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// i.i.d. draws from dist; identical (seed, stream, n) give identical output.
Sequence sample(const Distribution& dist, std::uint64_t n, RandomStream& stream);

// Symbol counts of n i.i.d. draws, without materializing the sequence.
// Draws consume the stream exactly like sample().
std::vector<std::uint64_t> sample_counts(const Distribution& dist, std::uint64_t n,
                                         RandomStream& stream);

// As above, accumulating into a caller-owned buffer (resized and zeroed).
void sample_counts_into(const Distribution& dist, std::uint64_t n, RandomStream& stream,
                        std::vector<std::uint64_t>& counts);

}  // namespace gutmanlab
