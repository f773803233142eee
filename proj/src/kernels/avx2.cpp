#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dampen/kernels.hpp"

namespace dampen::kernels::avx2 {
namespace {

// exp(x) for x <= 0. Cody-Waite reduction by ln 2 followed by a degree-13
// Taylor polynomial on |r| <= ln(2)/2; inputs below -708 flush to zero.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d floor_x = _mm256_set1_pd(-708.0);

  const __m256d underflow = _mm256_cmp_pd(x, floor_x, _CMP_LT_OQ);
  x = _mm256_max_pd(x, floor_x);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double kCoeff[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          1.0 / 2.0,         1.0,              1.0};
  __m256d p = _mm256_set1_pd(kCoeff[0]);
  for (std::size_t i = 1; i < sizeof(kCoeff) / sizeof(kCoeff[0]); ++i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kCoeff[i]));
  }

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);

  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
}

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double horizontal_max(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

double scalar_exp_nonpositive(double x) {
  alignas(32) double buf[4] = {x, 0.0, 0.0, 0.0};
  _mm256_store_pd(buf, exp_nonpositive(_mm256_load_pd(buf)));
  return buf[0];
}

}  // namespace

void softmax(std::span<const double> logits, std::span<double> out) {
  if (logits.size() != out.size()) throw std::invalid_argument("softmax: size mismatch");
  const std::size_t n = logits.size();
  if (n == 0) return;
  const double* in = logits.data();
  double* dst = out.data();

  std::size_t i = 0;
  double hi = in[0];
  if (n >= 4) {
    __m256d m = _mm256_loadu_pd(in);
    for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(in + i));
    hi = horizontal_max(m);
  }
  for (; i < n; ++i) hi = std::max(hi, in[i]);

  const __m256d shift = _mm256_set1_pd(hi);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i + 4 <= n; i += 4) {
    const __m256d e = exp_nonpositive(_mm256_sub_pd(_mm256_loadu_pd(in + i), shift));
    _mm256_storeu_pd(dst + i, e);
    acc = _mm256_add_pd(acc, e);
  }
  double total = horizontal_sum(acc);
  for (; i < n; ++i) {
    dst[i] = scalar_exp_nonpositive(in[i] - hi);
    total += dst[i];
  }

  const __m256d inv = _mm256_set1_pd(1.0 / total);
  for (i = 0; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), inv));
  const double inv_s = 1.0 / total;
  for (; i < n; ++i) dst[i] *= inv_s;
}

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i v = _mm256_and_si256(va, vb);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t count = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < words; ++i) count += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return count;
}

}  // namespace dampen::kernels::avx2
