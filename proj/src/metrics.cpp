#include "uti/metrics.hpp"
#include "uti/kernels.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace uti {

namespace {

void check_same(const Frame& a, const Frame& b, const char* op) {
  if (!a.same_size(b)) throw DimensionError(std::string(op) + ": dimension mismatch");
}

constexpr int kWin = 11;
constexpr int kRadius = kWin / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWin * kWin> gaussian_window() {
  std::array<double, kWin * kWin> w{};
  double sum = 0.0;
  for (int y = -kRadius; y <= kRadius; ++y)
    for (int x = -kRadius; x <= kRadius; ++x) {
      double g = std::exp(-(x * x + y * y) / (2.0 * kSigma * kSigma));
      w[(y + kRadius) * kWin + (x + kRadius)] = g;
      sum += g;
    }
  for (double& v : w) v /= sum;
  return w;
}

// One-channel SSIM over the interior (full-window) region.
double ssim_plane(const std::vector<double>& a, const std::vector<double>& b,
                  int w, int h) {
  static const auto win = gaussian_window();

  double total = 0.0;
  std::size_t count = 0;
  for (int y = kRadius; y < h - kRadius; ++y)
    for (int x = kRadius; x < w - kRadius; ++x) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      for (int dy = -kRadius; dy <= kRadius; ++dy)
        for (int dx = -kRadius; dx <= kRadius; ++dx) {
          const double g = win[(dy + kRadius) * kWin + (dx + kRadius)];
          const double va = a[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          const double vb = b[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          mu_a += g * va;
          mu_b += g * vb;
          aa += g * va * va;
          bb += g * vb * vb;
          ab += g * va * vb;
        }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++count;
    }
  return total / count;
}

std::vector<double> extract_channel(const Frame& f, int c) {
  std::vector<double> out(static_cast<std::size_t>(f.width) * f.height);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.data[i * 3 + c];
  return out;
}

std::vector<double> extract_luma(const Frame& f) {
  std::vector<double> out(static_cast<std::size_t>(f.width) * f.height);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.299 * f.data[i * 3] + 0.587 * f.data[i * 3 + 1] +
             0.114 * f.data[i * 3 + 2];
  return out;
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

} // namespace

double psnr(const Frame& a, const Frame& b) {
  check_same(a, b, "psnr");
  const double mse =
      kernels::sum_sq_diff(a.data.data(), b.data.data(), a.size()) / a.size();
  return psnr_from_mse(mse);
}

double psnr_luma(const Frame& a, const Frame& b) {
  check_same(a, b, "psnr");
  auto la = extract_luma(a), lb = extract_luma(b);
  const double mse = kernels::sum_sq_diff(la.data(), lb.data(), la.size()) / la.size();
  return psnr_from_mse(mse);
}

double ssim(const Frame& a, const Frame& b) {
  check_same(a, b, "ssim");
  if (a.width < kWin || a.height < kWin)
    throw DimensionError("ssim: image smaller than the 11x11 window");
  double total = 0.0;
  for (int c = 0; c < 3; ++c)
    total += ssim_plane(extract_channel(a, c), extract_channel(b, c),
                        a.width, a.height);
  return total / 3.0;
}

double ssim_luma(const Frame& a, const Frame& b) {
  check_same(a, b, "ssim");
  if (a.width < kWin || a.height < kWin)
    throw DimensionError("ssim: image smaller than the 11x11 window");
  return ssim_plane(extract_luma(a), extract_luma(b), a.width, a.height);
}

} // namespace uti
