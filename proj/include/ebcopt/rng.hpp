#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ebcopt {

// SplitMix64: a counter-based generator with a 64-bit state advanced by a
// fixed odd increment. Output is a bijective mix of the counter, so streams
// derived from distinct keys never share state. All experiment randomness
// flows through this type; replicate streams are derived from
// (base_seed, cell_index) via Rng::stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Documented splitting rule: the stream for cell k under base seed s is
  // seeded with mix(s) XOR mix(k + GAMMA), where mix is the SplitMix64
  // output function. Distinct (s, k) pairs give independent-looking streams.
  static Rng stream(std::uint64_t base_seed, std::uint64_t cell_index) {
    return Rng(mix(base_seed) ^ mix(cell_index + GAMMA));
  }

  std::uint64_t next_u64() {
    state_ += GAMMA;
    return mix(state_);
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    // rejection-free Lemire reduction is overkill here; modulo bias is
    // negligible for the small n used (n << 2^32), but reject anyway.
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // standard normal via Box-Muller (two fresh uniforms per draw)
  double normal() {
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // index sampled according to the (not necessarily normalized) weights
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  static constexpr std::uint64_t GAMMA = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z += GAMMA;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace ebcopt
