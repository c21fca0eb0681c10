#ifndef TILESTREAM_RNG_HPP_
#define TILESTREAM_RNG_HPP_

#include <cstdint>

namespace tilestream {

// Deterministic splitmix64 generator. All randomness in the library flows
// through explicit instances of this class so that runs are byte-identical
// across platforms and standard-library implementations (std distributions
// are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Independent substream; advancing the child never perturbs the parent
  // beyond the single draw taken here.
  Rng fork(std::uint64_t salt) {
    return Rng(next_u64() ^ (salt * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL));
  }

 private:
  std::uint64_t state_;
};

}  // namespace tilestream

#endif  // TILESTREAM_RNG_HPP_
