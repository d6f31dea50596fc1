#pragma once

#include <cstdint>
#include <limits>

namespace flowrecom {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i is mix64(key + i * gamma). The whole
// state is (key, counter), so streams can be derived, saved and resumed
// without touching any other stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key = 0, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  // Independent substream for (seed, step, attempt).
  static Rng derive(std::uint64_t seed, std::uint64_t step,
                    std::uint64_t attempt) noexcept {
    std::uint64_t k = mix64(seed ^ 0x5851F42D4C957F2DULL);
    k = mix64(k ^ mix64(step + 0x14057B7EF767814FULL));
    k = mix64(k ^ mix64(attempt + 0x2545F4914F6CDD1DULL));
    return Rng(k);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix64(key_ + (counter_++) * 0xD1B54A32D192ED03ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace flowrecom
