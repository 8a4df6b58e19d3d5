#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gjsq {

// Deterministic replication streams: stream (master_seed, substream) is
// independent of every other substream and reproducible across platforms.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t substream) {
    // splitmix64 over the pair gives well-separated seed material.
    std::uint64_t x = master_seed + 0x9e3779b97f4a7c15ULL * (substream + 1);
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
      std::uint64_t z = splitmix64(x);
      words[2 * i] = static_cast<std::uint32_t>(z);
      words[2 * i + 1] = static_cast<std::uint32_t>(z >> 32);
    }
    std::seed_seq seq(words, words + 8);
    gen_.seed(seq);
  }

  // Uniform on (0, 1]: never returns 0, so -log(u) is always finite.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on (0,1] uniforms; caches the spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gjsq
