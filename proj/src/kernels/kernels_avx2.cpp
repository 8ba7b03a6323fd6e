// AVX2 variants. Compiled with -mavx2 only; selected at runtime after a CPU
// probe. argmin_sum/diff_span/axpy use per-element add/mul exactly like the
// scalar reference (no FMA), so their results are bit-identical to it; dot
// differs only by reassociation of the accumulator.

#include "jpc/kernels.hpp"

#ifdef JPC_KERNELS_HAVE_AVX2

#include <immintrin.h>

#include <cassert>

namespace jpc::kernels::avx2 {

MinResult argmin_sum(const double* a, const double* b, int n) {
  assert(n >= 1);
  double best;
  {
    // Pass 1: the minimum value.
    int i = 0;
    if (n >= 4) {
      __m256d vmin = _mm256_add_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
      for (i = 4; i + 4 <= n; i += 4) {
        const __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        vmin = _mm256_min_pd(vmin, s);
      }
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, vmin);
      best = lanes[0];
      for (int k = 1; k < 4; ++k)
        if (lanes[k] < best) best = lanes[k];
    } else {
      best = a[0] + b[0];
      i = 1;
    }
    for (; i < n; ++i) {
      const double s = a[i] + b[i];
      if (s < best) best = s;
    }
  }
  // Pass 2: first index attaining it (sums recompute to identical bits).
  int i = 0;
  const __m256d vbest = _mm256_set1_pd(best);
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(s, vbest, _CMP_EQ_OQ));
    if (mask) return {best, i + __builtin_ctz(static_cast<unsigned>(mask))};
  }
  for (; i < n; ++i)
    if (a[i] + b[i] == best) return {best, i};
  return {best, n - 1};  // unreachable for finite inputs
}

double dot(const double* a, const double* b, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

MinMax diff_span(const double* a, const double* b, int n) {
  assert(n >= 1);
  int i = 0;
  double lo, hi;
  if (n >= 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
    __m256d vlo = d, vhi = d;
    for (i = 4; i + 4 <= n; i += 4) {
      d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
      vlo = _mm256_min_pd(vlo, d);
      vhi = _mm256_max_pd(vhi, d);
    }
    alignas(32) double ls[4], hs[4];
    _mm256_store_pd(ls, vlo);
    _mm256_store_pd(hs, vhi);
    lo = ls[0];
    hi = hs[0];
    for (int k = 1; k < 4; ++k) {
      if (ls[k] < lo) lo = ls[k];
      if (hs[k] > hi) hi = hs[k];
    }
  } else {
    lo = hi = a[0] - b[0];
    i = 1;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  return {lo, hi};
}

void axpy(double alpha, const double* x, double* y, int n) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace jpc::kernels::avx2

#endif  // JPC_KERNELS_HAVE_AVX2
