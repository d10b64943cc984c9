#include "qdpi/rng.hpp"

#include <cmath>
#include <numbers>

namespace qdpi {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t draw(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGamma);
}

}  // namespace

std::uint64_t CounterRng::substream(std::uint64_t seed, std::uint64_t index) {
  return seed ^ draw(0, index);
}

std::uint64_t CounterRng::next_u64() { return draw(seed_, counter_++); }

double CounterRng::next_uniform() {
  // Top 53 bits, shifted into (0,1) with half-ulp offsets at both ends.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::complex<double> CounterRng::next_complex_gaussian() {
  const double re = next_gaussian();
  const double im = next_gaussian();
  return {re, im};
}

}  // namespace qdpi
