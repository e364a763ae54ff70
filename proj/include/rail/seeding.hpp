#pragma once

#include <cstdint>
#include <initializer_list>

namespace rail {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and an index, so a trial's randomness never depends on the
/// order or thread in which trials run.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ (index + 0x632BE59BD9B4E019ull));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  for (auto p : path) seed = derive_seed(seed, p);
  return seed;
}

// Stream tags for the per-trial sub-seeds.
namespace stream {
inline constexpr std::uint64_t data_bits = 0xB175;
inline constexpr std::uint64_t hop_schedule = 0x4095;
inline constexpr std::uint64_t fading = 0xFADE;
inline constexpr std::uint64_t noise = 0xA3C9;
inline constexpr std::uint64_t height = 0x4E16;
inline constexpr std::uint64_t trajectory = 0x7EA1;
}  // namespace stream

}  // namespace rail
