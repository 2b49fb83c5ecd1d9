#pragma once

#include <cstdint>
#include <random>

namespace smtj {

/// All stochastic code in this library draws from a caller-owned engine so
/// that every run is reproducible from its seed.
using Rng = std::mt19937_64;

/// splitmix64 scramble; decorrelates small consecutive seeds before they
/// reach the engine and derives independent per-trial streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Seed for sub-stream `salt` of a base seed (per-trial, per-stage, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return mix64(base ^ mix64(salt + 0x51'7c'c1'b7'27'22'0a'95ULL));
}

/// Uniform double in [0,1) from the top 53 bits; avoids
/// std::uniform_real_distribution so streams are identical across platforms.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n >= 1. Lemire-style multiply-shift; the tiny
/// modulo bias (< 2^-64 * n) is irrelevant here and the mapping is portable.
inline std::size_t uniform_below(Rng& rng, std::size_t n) {
  using u128 = unsigned __int128;
  return static_cast<std::size_t>((u128(rng()) * u128(n)) >> 64);
}

}  // namespace smtj
