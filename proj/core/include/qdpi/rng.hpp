#pragma once

#include <cstdint>
#include <complex>

namespace qdpi {

/// Deterministic counter-based random stream built on the SplitMix64 output
/// function.  Draw i of stream s is
///
///   mix64(s + (i + 1) * 0x9E3779B97F4A7C15)
///
/// where mix64 is the standard SplitMix64 finalizer:
///
///   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27;  z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
///
/// Uniform doubles take the top 53 bits into (0,1) exclusive; Gaussians are
/// produced by Box-Muller from consecutive uniforms.  Any implementation that
/// follows this recipe reproduces the streams bit for bit, independent of
/// platform or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Substream for instance `index` of a run seeded with `seed`:
  /// seed XOR (draw `index` of the stream seeded with 0).
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on (0,1), endpoints excluded.
  double next_uniform();
  /// Standard normal via Box-Muller (consumes two uniforms per pair).
  double next_gaussian();
  /// Re and Im independently standard normal.
  std::complex<double> next_complex_gaussian();

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qdpi
