#include "spcdrift/rng.hpp"

#include <cmath>

namespace spcdrift {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t bounded(Xoshiro256& rng, std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  u128 m = static_cast<u128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t binomial(Xoshiro256& rng, std::uint64_t n, double p) noexcept {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (uniform01(rng) < p) ++hits;
  }
  return hits;
}

double standard_normal(Xoshiro256& rng) noexcept {
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

}  // namespace spcdrift
