#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cob {

/// Seedable random stream for simulation runs.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All derived draws use the conversions below instead of the
/// <random> distributions (those are implementation-defined), so a given
/// seed reproduces a run bit for bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Unbiased integer in [0, n) by Lemire's multiply-and-reject; n > 0.
  std::uint64_t below(std::uint64_t n) {
    auto x = engine_();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cob
