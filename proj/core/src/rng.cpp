#include "bomp/rng.hpp"

#include <cmath>
#include <numbers>

namespace bomp {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(base);
  for (std::uint64_t key : keys) h = mix64(h ^ mix64(key + kGolden));
  return h;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * kTwoPowMinus53;
}

double Rng::normal() {
  const double u1 = static_cast<double>((next() >> 11) + 1) * kTwoPowMinus53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // 2^64 mod n; words at or above 2^64 - reject would bias the remainder.
  const std::uint64_t reject = (UINT64_MAX % n + 1) % n;
  std::uint64_t x = next();
  while (reject != 0 && x >= 0 - reject) x = next();
  return x % n;
}

}  // namespace bomp
