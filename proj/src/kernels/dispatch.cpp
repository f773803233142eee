#include <cstdlib>
#include <cstring>

#include "dampen/kernels.hpp"

namespace dampen::kernels {
namespace {

bool force_scalar() {
  const char* v = std::getenv("DAMPEN_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "") != 0 && std::strcmp(v, "0") != 0;
}

struct Table {
  Isa isa;
  void (*softmax)(std::span<const double>, std::span<double>);
  std::uint64_t (*and_popcount)(const std::uint64_t*, const std::uint64_t*, std::size_t);
};

Table select() {
#if defined(DAMPEN_HAVE_AVX2)
  if (avx2_supported() && !force_scalar()) return {Isa::avx2, &avx2::softmax, &avx2::and_popcount};
#endif
  return {Isa::scalar, &scalar::softmax, &scalar::and_popcount};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

bool avx2_compiled() {
#if defined(DAMPEN_HAVE_AVX2)
  return true;
#else
  return false;
#endif
}

bool avx2_supported() {
#if defined(DAMPEN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void softmax(std::span<const double> logits, std::span<double> out) { table().softmax(logits, out); }

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  return table().and_popcount(a, b, words);
}

}  // namespace dampen::kernels
