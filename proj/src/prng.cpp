#include "arcenv/prng.hpp"

#include <bit>

namespace arcenv {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kDrawSalt = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kSeedSalt = 0x6a09e667f3bcc909ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PrngKey PrngKey::from_seed(std::uint64_t seed) { return {mix64(seed ^ kSeedSalt), mix64(seed + kGolden)}; }

PrngKey split_child(PrngKey key, std::uint64_t i) {
  return {mix64(mix64(key.hi + (2 * i + 1) * kGolden) ^ key.lo),
          mix64(mix64(key.lo + (2 * i + 2) * kGolden) ^ std::rotl(key.hi, 32))};
}

std::vector<PrngKey> split(PrngKey key, std::size_t n) {
  std::vector<PrngKey> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = split_child(key, i);
  return out;
}

std::pair<PrngKey, PrngKey> split2(PrngKey key) { return {split_child(key, 0), split_child(key, 1)}; }

std::uint64_t random_bits(PrngKey key) { return mix64(mix64(key.hi ^ kDrawSalt) + key.lo); }

std::uint32_t uniform_index(PrngKey key, std::uint32_t n) {
  const unsigned __int128 product = static_cast<unsigned __int128>(random_bits(key)) * n;
  return static_cast<std::uint32_t>(product >> 64);
}

}  // namespace arcenv
