#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <string_view>

namespace gausslim {

/// Root reproducibility token. Every random stream in the library is derived
/// from one of these plus a label and an index.
struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t bits_of(double x) noexcept { return std::bit_cast<std::uint64_t>(x); }

/// Stream for (seed, label, index). Streams depend only on these three values,
/// never on the order in which they are requested.
inline Engine derive_stream(Seed seed, std::string_view label, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed.value);
  h = splitmix64(h ^ fnv1a64(label));
  h = splitmix64(h ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(splitmix64(h)),
                    static_cast<std::uint32_t>(splitmix64(h) >> 32)};
  return Engine(seq);
}

/// Uniform on (0, 1]; never returns zero, so it is safe for inverse-CDF tails.
inline double uniform_open0(Engine& eng) noexcept {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on [0, 1).
inline double uniform01(Engine& eng) noexcept {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace gausslim
