// AVX2 variants of the dispatched kernels. Compiled with -mavx2 but
// without -mfma: mul followed by add rounds exactly like the scalar
// reference, so both backends produce bit-identical output.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cstddef>

namespace uti::kernels::avx2 {

void axpby(double a, const double* x, double b, const double* y,
           double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d r = _mm256_add_pd(_mm256_mul_pd(va, vx), _mm256_mul_pd(vb, vy));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void clamp01(double* x, std::size_t n) {
  const __m256d lo = _mm256_setzero_pd();
  const __m256d hi = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_min_pd(_mm256_max_pd(v, lo), hi);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) {
    double v = x[i];
    v = v < 0.0 ? 0.0 : v;
    x[i] = v > 1.0 ? 1.0 : v;
  }
}

void lerp(const double* w, const double* a, const double* b,
          double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vw = _mm256_loadu_pd(w + i);
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    __m256d r = _mm256_add_pd(_mm256_mul_pd(vw, va),
                              _mm256_mul_pd(_mm256_sub_pd(one, vw), vb));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = w[i] * a[i] + (1.0 - w[i]) * b[i];
}

} // namespace uti::kernels::avx2

#endif // __x86_64__
