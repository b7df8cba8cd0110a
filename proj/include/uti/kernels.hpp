#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the flow / trajectory / synthesis
// modules. Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2 variant selected at runtime. The AVX2 variants use
// separate mul/add (no FMA contraction) so scalar and vector paths are
// bit-identical; the equivalence tests assert exactly that.

namespace uti::kernels {

enum class Backend { scalar, avx2 };

bool avx2_supported();

// Active backend for all dispatched kernels. Defaults to the best
// supported one; can be forced (e.g. UTI_KERNELS=scalar, or from tests).
Backend active_backend();
void set_backend(Backend b);
std::string backend_name(Backend b);

// out[i] = a*x[i] + b*y[i]
void axpby(double a, const double* x, double b, const double* y,
           double* out, std::size_t n);

// out[i] = a*x[i]
void scale(double a, const double* x, double* out, std::size_t n);

// x[i] = min(max(x[i], 0), 1)
void clamp01(double* x, std::size_t n);

// out[i] = w[i]*a[i] + (1-w[i])*b[i]
void lerp(const double* w, const double* a, const double* b,
          double* out, std::size_t n);

// Deterministic pairwise sum (order independent of backend).
double pairwise_sum(const double* x, std::size_t n);

// sum over i of (a[i]-b[i])^2, pairwise order.
double sum_sq_diff(const double* a, const double* b, std::size_t n);

} // namespace uti::kernels
