#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cdag {

/// 64-bit mixing step used to derive independent per-item seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of batch item `i`: splitmix64(seed + i * golden-ratio constant).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed + i * 0x9E3779B97F4A7C15ULL);
}

/// Thin wrapper over mt19937_64. The distribution helpers are written out by
/// hand because the standard library's distributions are not reproducible
/// across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do r = engine_();
    while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  double exponential() { return -std::log1p(-uniform()); }

  /// Draw from a symmetric Dirichlet(1), floored at `floor` and renormalized.
  std::vector<double> dirichlet1(int k, double floor = 1e-6) {
    std::vector<double> w(static_cast<std::size_t>(k));
    double s = 0.0;
    for (auto& x : w) s += (x = exponential());
    double t = 0.0;
    for (auto& x : w) t += (x = std::max(x / s, floor));
    for (auto& x : w) x /= t;
    return w;
  }

  /// Index drawn from a discrete distribution.
  int categorical(const std::vector<double>& p) {
    double u = uniform(), acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cdag
