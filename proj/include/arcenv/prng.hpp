#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace arcenv {

/// Splittable counter-based PRNG key.
///
/// All randomness is derived from a 128-bit key with the SplitMix64
/// finalizer (Stafford "Mix13" variant):
///
///   mix64(z) = z ^= z >> 30; z *= 0xbf58476d1ce4e5b9;
///              z ^= z >> 27; z *= 0x94d049bb133111eb; z ^ (z >> 31)
///
/// Child i of key (a, b), for i = 0, 1, 2, ...:
///
///   hi = mix64(mix64(a + (2i + 1) * G) ^ b)
///   lo = mix64(mix64(b + (2i + 2) * G) ^ rotl(a, 32))
///
/// with G = 0x9e3779b97f4a7c15. Seeds map to keys as
///
///   from_seed(s) = (mix64(s ^ 0x6a09e667f3bcc909), mix64(s + G))
///
/// and a key yields one 64-bit draw:
///
///   bits(a, b) = mix64(mix64(a ^ 0xd1b54a32d192ed03) + b)
///
/// Child i depends only on (key, i), so split(k, n)[i] == split(k, m)[i]
/// whenever i < min(n, m). A key that has been split should not be drawn from.
struct PrngKey {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  static PrngKey from_seed(std::uint64_t seed);

  friend bool operator==(const PrngKey&, const PrngKey&) = default;
};

std::uint64_t mix64(std::uint64_t z);

PrngKey split_child(PrngKey key, std::uint64_t i);
std::vector<PrngKey> split(PrngKey key, std::size_t n);
std::pair<PrngKey, PrngKey> split2(PrngKey key);

std::uint64_t random_bits(PrngKey key);

/// Uniform index in [0, n) by multiply-shift: the upper 64 bits of bits * n.
/// Bias is at most n / 2^64 per outcome.
std::uint32_t uniform_index(PrngKey key, std::uint32_t n);

}  // namespace arcenv
