#pragma once

#include <cstdint>

namespace manneal {

// Deterministic random stream. A (seed, stream_id) pair fully determines the
// draw sequence, so independent replicas can own disjoint streams without any
// shared state. Based on splitmix64: the state walks a Weyl sequence and each
// output is a strong 64-bit mix of the state.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform01();    // uniform in [0, 1)
  double normal();       // standard normal (Box-Muller, spare cached)
  double exponential();  // rate-1 exponential

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace manneal
