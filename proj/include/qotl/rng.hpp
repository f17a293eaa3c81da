#pragma once

#include <array>
#include <cstdint>

namespace qotl {

/// Counter-keyed xoshiro256** generator. Child streams are derived from the
/// parent's key without consuming parent state, so the stream layout of a run
/// is a pure function of the root seed and the derivation tags.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Unbiased integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);
  /// Box-Muller normal draw; no spare is cached, two uniforms per call.
  double normal(double mean, double stddev);

  /// Child stream keyed by (this stream's key, tags...). Does not advance *this.
  template <class... Tags>
  Rng stream(Tags... tags) const {
    std::uint64_t key = key_;
    ((key = mix_key(key, static_cast<std::uint64_t>(tags))), ...);
    return Rng(key);
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t mix_key(std::uint64_t key, std::uint64_t tag);

  std::array<std::uint64_t, 4> s_;
  std::uint64_t key_;
};

}  // namespace qotl
