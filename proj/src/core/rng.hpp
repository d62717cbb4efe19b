#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sdti {

// Seeded generator shared by every stochastic component. Streams are
// reproducible for a fixed seed on a given standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive stable hash used to derive child seeds, e.g. (seed, epoch).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace sdti
