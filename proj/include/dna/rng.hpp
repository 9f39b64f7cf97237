#ifndef DNA_RNG_HPP_
#define DNA_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>

namespace dna {

// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds a list of stream tags into a seed, e.g. derive_seed(seed, {step, i}).
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t tag : tags) h = mix64(h ^ mix64(tag + 0x632BE59BD9B4E019ULL));
  return h;
}

// Seeded stream with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
// standard distributions are implementation-defined, so uniform reals, bounded
// integers and Gaussians are derived here directly from raw engine output:
//   uniform()        53 high bits scaled into [0, 1)
//   uniform_index(n) rejection sampling on the 64-bit output, no modulo bias
//   normal()         Box-Muller, second variate cached for the next call
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double normal() {
    if (cached_normal_) {
      const double z = *cached_normal_;
      cached_normal_.reset();
      return z;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

}  // namespace dna

#endif  // DNA_RNG_HPP_
