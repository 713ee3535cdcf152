#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace mtl {

// splitmix64 finalizer; used to spread seed material.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic sub-seed for a named stream. Every parameter tensor, shuffle
// and dropout site derives its own stream from (base_seed, path) so that
// adding or removing unrelated modules never shifts anyone else's draws.
inline std::uint64_t seed_for(std::uint64_t base, std::string_view path) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(base);
  for (unsigned char c : path) {
    h ^= c;
    h *= 0x100000001b3ULL;  // FNV-1a
  }
  return mix64(h);
}

inline std::uint64_t seed_for(std::uint64_t base, std::string_view path,
                              std::uint64_t a, std::uint64_t b = 0) {
  return mix64(seed_for(base, path) ^ mix64(a * 0x9e3779b97f4a7c15ULL + b));
}

// Hand-rolled generator (xoshiro-free, just splitmix64 stepping) so draws are
// identical across standard libraries and platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix64(seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Deterministic Fisher-Yates.
template <typename Vec>
void shuffle_stream(Vec& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace mtl
