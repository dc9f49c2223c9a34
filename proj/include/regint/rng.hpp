#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace regint {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for (seed, stream, substream): the same triple always yields
/// the same sequence, whichever thread draws it.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0) {
  std::seed_seq seq{std::uint32_t(mix64(seed)), std::uint32_t(mix64(seed) >> 32),
                    std::uint32_t(mix64(stream ^ 0x5851f42d4c957f2dULL)),
                    std::uint32_t(mix64(stream ^ 0x5851f42d4c957f2dULL) >> 32),
                    std::uint32_t(mix64(sub + 0x14057b7ef767814fULL)),
                    std::uint32_t(mix64(sub + 0x14057b7ef767814fULL) >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on (0, 1), never 0.
template <typename G>
double uniform01(G& g) {
  return (double(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal by Box–Muller on the open interval (portable across standard libraries).
template <typename G>
double std_normal(G& g) {
  const double u = uniform01(g), v = uniform01(g);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

/// Exponential(rate) by inversion.
template <typename G>
double exponential(G& g, double rate) {
  return -std::log(uniform01(g)) / rate;
}

}  // namespace regint
