#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fhmdp {

// One avalanche round of splitmix64. Used as a one-shot hash when deriving
// substream keys and as the transition function of SplitMix64.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Key derivation for independent substreams. Chaining mix_key calls gives a
// fully avalanched key per tag tuple.
inline std::uint64_t mix_key(std::uint64_t key, std::uint64_t tag) {
  return splitmix64(key ^ (0x9e3779b97f4a7c15ULL + tag));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Minimal keyed stream. Cheap to construct, so a fresh stream can be derived
// for every update tuple; synchronous sweeps stay order-independent.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  double next_unit() { return unit_double(next()); }

 private:
  std::uint64_t state_;
};

// General-purpose stream backed by std::mt19937_64. Conversions to doubles
// and bounded ints are done here rather than through <random> distributions,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double next_unit() { return unit_double(next()); }

  // Uniform integer in [0, bound). Multiplicative range reduction; the bias
  // is O(bound / 2^64), irrelevant at tabular sizes.
  int next_int(int bound) {
    return static_cast<int>(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) *
         static_cast<unsigned __int128>(bound)) >> 64));
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Standard exponential via inverse CDF.
  double next_exponential() { return -std::log1p(-next_unit()); }

  // Stream derived from this stream's seed and a tag. Independent of how much
  // of this stream has been consumed.
  Rng substream(std::uint64_t tag) const { return Rng(mix_key(seed_, tag)); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fhmdp
