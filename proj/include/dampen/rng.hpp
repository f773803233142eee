#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace dampen {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
// stream is identical across standard library implementations.
double uniform01(Rng& rng);

// Laplace(0, scale) by inverse CDF.
double laplace(Rng& rng, double scale);

// Uniform integer in [0, bound) without modulo bias.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Deterministic seed derivation for independent streams.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_label(std::string_view label);

}  // namespace dampen
