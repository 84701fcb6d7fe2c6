#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bomp {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and an ordered key
/// tuple. Each key is folded in as h <- mix64(h ^ mix64(key + golden)), so
/// adding keys for new grid points never changes existing derivations.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys) noexcept;

/// Seeded random stream with a fully specified output sequence:
///   word     = std::mt19937_64 output (standardized by the C++ library)
///   uniform  = (word >> 11) * 2^-53                      in [0, 1)
///   normal   = sqrt(-2 ln u1) * cos(2 pi u2), with
///              u1 = ((word1 >> 11) + 1) * 2^-53 in (0, 1], u2 = uniform()
///   below(n) = word % n after rejecting the top 2^64 mod n words
/// The sequence is therefore reproducible across standard libraries, unlike
/// std::normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bomp
