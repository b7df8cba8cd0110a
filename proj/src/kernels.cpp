#include "uti/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace uti::kernels {

namespace scalar {

void axpby(double a, const double* x, double b, const double* y,
           double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void clamp01(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    v = v < 0.0 ? 0.0 : v;
    x[i] = v > 1.0 ? 1.0 : v;
  }
}

void lerp(const double* w, const double* a, const double* b,
          double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = w[i] * a[i] + (1.0 - w[i]) * b[i];
}

} // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void axpby(double a, const double* x, double b, const double* y,
           double* out, std::size_t n);
void scale(double a, const double* x, double* out, std::size_t n);
void clamp01(double* x, std::size_t n);
void lerp(const double* w, const double* a, const double* b,
          double* out, std::size_t n);
} // namespace avx2
#endif

bool avx2_supported() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("UTI_KERNELS")) {
    std::string s(env);
    if (s == "scalar") return Backend::scalar;
    if (s == "avx2" && avx2_supported()) return Backend::avx2;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = initial_backend();

} // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported())
    throw std::runtime_error("avx2 backend not supported on this CPU");
  g_backend = b;
}

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void axpby(double a, const double* x, double b, const double* y,
           double* out, std::size_t n) {
#if defined(__x86_64__)
  if (g_backend == Backend::avx2) return avx2::axpby(a, x, b, y, out, n);
#endif
  scalar::axpby(a, x, b, y, out, n);
}

void scale(double a, const double* x, double* out, std::size_t n) {
#if defined(__x86_64__)
  if (g_backend == Backend::avx2) return avx2::scale(a, x, out, n);
#endif
  scalar::scale(a, x, out, n);
}

void clamp01(double* x, std::size_t n) {
#if defined(__x86_64__)
  if (g_backend == Backend::avx2) return avx2::clamp01(x, n);
#endif
  scalar::clamp01(x, n);
}

void lerp(const double* w, const double* a, const double* b,
          double* out, std::size_t n) {
#if defined(__x86_64__)
  if (g_backend == Backend::avx2) return avx2::lerp(w, a, b, out, n);
#endif
  scalar::lerp(w, a, b, out, n);
}

// Pairwise reduction; the split point depends only on n, so the result
// is identical for every backend and thread count.
namespace {

double pairwise_sum_impl(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

double sum_sq_diff_impl(const double* a, const double* b, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }
  std::size_t half = n / 2;
  return sum_sq_diff_impl(a, b, half) + sum_sq_diff_impl(a + half, b + half, n - half);
}

} // namespace

double pairwise_sum(const double* x, std::size_t n) {
  return pairwise_sum_impl(x, n);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return sum_sq_diff_impl(a, b, n);
}

} // namespace uti::kernels
