#include <cmath>

#include "dampen/error.hpp"
#include "dampen/rng.hpp"

namespace dampen {
namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double laplace(Rng& rng, double scale) {
  if (!(scale >= 0.0)) throw InvalidInput("laplace: scale must be nonnegative");
  double u = uniform01(rng) - 0.5;
  while (u == -0.5) u = uniform01(rng) - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -mag : mag;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidInput("uniform_below: bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) h = splitmix(h ^ splitmix(p));
  return h;
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dampen
