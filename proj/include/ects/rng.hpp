#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ects {

// Deterministic random stream used for splits and synthetic data.
//
// The standard library's distributions (std::normal_distribution,
// std::shuffle, generate_canonical) are implementation-defined, so relying on
// them would break the byte-identical-output guarantee across toolchains.
// Everything here is pinned: splitmix64 core, 53-bit uniforms, Box-Muller
// gaussians, Fisher-Yates shuffles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64 (Steele, Lea, Flood 2014); passes BigCrush.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; the second deviate is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Independent child seed for substream `index` of a master seed. Used so
// per-series generators do not share state and insertion order is irrelevant.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  Rng mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return mixer.next_u64();
}

}  // namespace ects
