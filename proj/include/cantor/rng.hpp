#pragma once

// Reproducible randomness: MT19937-64 (the engine the C++ standard pins bit-for-bit), seeded per
// stream through SplitMix64 so that (seed, stream id) pairs give independent-looking sequences.

#include <cstdint>
#include <random>

#include "cantor/basic_sequence.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/rational.hpp"

namespace cantor {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream + 0x6a09e667f3bcc909ull))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound), bound >= 1, without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  BigInt below(const BigInt& bound) {
    if (fits_u64(bound)) return big(below(to_u64(bound)));
    const auto bits = mpz_sizeinbase(BigInt(bound - 1).get_mpz_t(), 2);
    const auto words = (bits + 63) / 64;
    std::vector<std::uint64_t> buf(words);
    BigInt r;
    while (true) {
      for (auto& w : buf) w = next();
      if (bits % 64) buf[0] &= (std::uint64_t{1} << (bits % 64)) - 1;
      mpz_import(r.get_mpz_t(), words, 1, sizeof(std::uint64_t), 0, 0, buf.data());
      if (r < bound) return r;
    }
  }

  /// Uniform in [0, 1) on the dyadic grid of step 2^-53.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Digits E_n uniform on {0, ..., q_n - 1}: an almost surely normal surrogate.
inline DigitStream random_stream(const BasicSequence& q, std::size_t length, std::uint64_t seed,
                                 std::uint64_t stream = 0) {
  Rng rng(seed, stream);
  DigitStream s{q, 0, {}, Tail::Unknown};
  const auto qs = q.prefix(length);
  s.digits.reserve(length);
  for (const auto& b : qs) s.digits.push_back(rng.below(b));
  return s;
}

}  // namespace cantor
