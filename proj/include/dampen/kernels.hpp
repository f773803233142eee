#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dampen::kernels {

enum class Isa { scalar, avx2 };

// Instruction set used by the dispatching entry points. Chosen once per
// process from CPU features; DAMPEN_FORCE_SCALAR=1 pins it to scalar.
Isa active_isa();
std::string_view isa_name(Isa isa);
bool avx2_compiled();
bool avx2_supported();

// out[i] = exp(logits[i] - max) / sum_j exp(logits[j] - max).
// Sizes must match; an empty input is a no-op.
void softmax(std::span<const double> logits, std::span<double> out);

// Number of set bits in (a & b) over `words` 64-bit words.
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);

namespace scalar {
void softmax(std::span<const double> logits, std::span<double> out);
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
}  // namespace scalar

#if defined(DAMPEN_HAVE_AVX2)
namespace avx2 {
void softmax(std::span<const double> logits, std::span<double> out);
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
}  // namespace avx2
#endif

}  // namespace dampen::kernels
