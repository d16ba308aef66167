// Coil sensitivity maps: synthetic simulation, low-resolution estimation
// from the calibration region, and the SENSE combine/expand pair.
#pragma once

#include <cstdint>
#include <vector>

#include "mrdc/core.hpp"
#include "mrdc/sampling.hpp"

namespace mrdc {

struct SensitivityMaps {
    CoilStack maps;                     // C_i, pixelwise RSS-normalized on support
    std::vector<std::uint8_t> support;  // 1 where maps are defined, 0 elsewhere

    int n_coil() const { return maps.n_coil; }
    int height() const { return maps.height; }
    int width() const { return maps.width; }
};

/// Smooth synthetic maps: Gaussian magnitude profiles centered at equally
/// spaced angles around the FOV with smooth phase ramps, RSS-normalized to 1
/// at every pixel. Support covers the whole frame.
SensitivityMaps simulate_sensitivities(int height, int width, int n_coil,
                                       std::uint64_t seed);

/// Low-resolution estimate from the calib central k-space lines: apodize,
/// zero-pad, ifft2c, normalize by the root-sum-of-squares image. Pixels with
/// RSS below eps * max(RSS) fall outside the support and get zero maps.
SensitivityMaps estimate_sensitivities(const MultiCoilKSpace& s0,
                                       const SamplingMask& mask, int calib,
                                       double eps = 0.05);

/// x(p) = sum_i conj(C_i(p)) * x_i(p)  (adjoint of expand).
ComplexImage combine(const MultiCoilImage& coil_imgs, const SensitivityMaps& maps);

/// x_i(p) = C_i(p) * x(p).
MultiCoilImage expand(const ComplexImage& img, const SensitivityMaps& maps);

}  // namespace mrdc
