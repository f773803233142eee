#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dampen/kernels.hpp"

namespace dampen::kernels::scalar {

void softmax(std::span<const double> logits, std::span<double> out) {
  if (logits.size() != out.size()) throw std::invalid_argument("softmax: size mismatch");
  if (logits.empty()) return;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    total += out[i];
  }
  const double inv = 1.0 / total;
  for (double& v : out) v *= inv;
}

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < words; ++i) count += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return count;
}

}  // namespace dampen::kernels::scalar
