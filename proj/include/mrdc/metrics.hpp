// PSNR and SSIM on magnitude images. The data range L is the peak reference
// magnitude inside the region of interest; SSIM uses the canonical 11x11
// Gaussian window (sigma 1.5) with K1 = 0.01, K2 = 0.03.
#pragma once

#include <cstdint>
#include <vector>

#include "mrdc/core.hpp"

namespace mrdc {

/// 10*log10(L^2 / MSE) over the roi (empty roi = full frame). Returns +inf
/// when pred equals ref on the roi.
double psnr(const ComplexImage& pred, const ComplexImage& ref,
            const std::vector<std::uint8_t>& roi = {});

/// Mean local SSIM over window centers inside the roi. Windows must fit in
/// the frame, so both dims must be >= 11.
double ssim(const ComplexImage& pred, const ComplexImage& ref,
            const std::vector<std::uint8_t>& roi = {});

}  // namespace mrdc
