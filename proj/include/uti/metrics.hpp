#pragma once

#include "uti/frame.hpp"

namespace uti {

// 10*log10(1/MSE) over all channels in [0,1] space; +inf when identical.
double psnr(const Frame& a, const Frame& b);

// Mean structural similarity: 11x11 Gaussian window sigma=1.5,
// C1=(0.01)^2, C2=(0.03)^2 on the [0,1] range, averaged over the three
// channels. Border pixels without a full window are excluded.
double ssim(const Frame& a, const Frame& b);

// Luma (Rec.601) variants used by the --luma report mode.
double psnr_luma(const Frame& a, const Frame& b);
double ssim_luma(const Frame& a, const Frame& b);

} // namespace uti
