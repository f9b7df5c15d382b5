#pragma once

#include <cstdint>

namespace hwrec {

// Portable deterministic RNG (splitmix64 core) so seeded artifacts are
// identical across standard libraries and platforms.
struct Rng {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64();
  double uniform();                     // [0,1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);      // inclusive
  double normal();                      // Box-Muller

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hwrec
