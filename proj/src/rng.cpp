#include "manneal/rng.hpp"

#include <cmath>
#include <numbers>

namespace manneal {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      // Decorrelate streams: the start state is a mix of the seed and a
      // mixed stream_id, so nearby ids land far apart in the Weyl walk.
      state_(mix64(seed + kGamma) + mix64(stream_id + 0x243F6A8885A308D3ULL)) {}

std::uint64_t RandomStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // log1p(-u) is finite for u in [0,1), so no rejection loop is needed.
  double u = uniform01();
  double v = uniform01();
  double r = std::sqrt(-2.0 * std::log1p(-u));
  double a = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RandomStream::exponential() {
  return -std::log1p(-uniform01());
}

}  // namespace manneal
