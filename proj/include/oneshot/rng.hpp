#pragma once

#include "oneshot/types.hpp"

#include <cstdint>
#include <random>

namespace oneshot {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds from one master seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = mix64(master ^ mix64(a));
  s = mix64(s ^ mix64(b + 0x1234567887654321ull));
  return mix64(s ^ mix64(c + 0xabcdef0123456789ull));
}

/// Independent stream keyed by (master, a, b, c). Results depend only on the key,
/// never on scheduling, so fan-out across threads stays reproducible.
inline Rng make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  return Rng(derive_seed(master, a, b, c));
}

inline double normal_draw(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double uniform_draw(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

inline ArrayXd normal_array(long n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ArrayXd out(n);
  for (long i = 0; i < n; ++i) out[i] = dist(rng);
  return out;
}

inline VectorXd normal_vector(long n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorXd out(n);
  for (long i = 0; i < n; ++i) out[i] = dist(rng);
  return out;
}

}  // namespace oneshot
