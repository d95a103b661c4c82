#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace smmcts {

// Deterministic 64-bit generator (splitmix64). Every randomized code path in
// the library draws through this class, so results are bit-identical across
// platforms, compilers, and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Lemire's multiply-shift; the bias for desk-scale
  // n is far below anything observable.
  int next_below(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
  }

  // Categorical draw. Weights need not be exactly normalized; the final index
  // absorbs any rounding residue.
  int sample(std::span<const double> probs) {
    double u = next_unit();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::uint64_t state_;
};

// Hash-chains a base seed with a path of indices. Used to hand independent
// streams to the cells of a parallel experiment so that scheduling order can
// never influence results.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  Rng mix(base);
  std::uint64_t s = mix.next_u64();
  for (std::uint64_t p : path) {
    Rng step(s ^ (p + 0x9e3779b97f4a7c15ULL));
    s = step.next_u64();
  }
  return s;
}

}  // namespace smmcts
