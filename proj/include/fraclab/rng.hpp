#pragma once

#include <cmath>
#include <cstdint>

namespace fraclab {

// Counter-based splittable generator in the SplitMix64 family.
//
// A draw is a stateless hash of (key, counter); the counter just increments.
// split(stream) derives an unrelated key from (key, stream), so replica i can
// own stream i and produce the same numbers no matter which worker runs it or
// in what order. Mixing constants are the usual Stafford mix13 / splitmix64
// ones (Steele, Lea, Flood 2014).
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kSeedTweak)), counter_(0) {}

  // Child generator for an independent stream; does not disturb this one.
  SplitRng split(std::uint64_t stream) const {
    SplitRng child(0);
    child.key_ = mix(key_ ^ mix(kStreamTweak + stream * kGamma));
    child.counter_ = 0;
    child.has_cached_normal_ = false;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // tangents of the result are safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double exponential() { return -std::log(uniform()); }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * kPi * uniform();
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kSeedTweak = 0x5851F42D4C957F2Dull;
  static constexpr std::uint64_t kStreamTweak = 0xD1342543DE82EF95ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace fraclab
