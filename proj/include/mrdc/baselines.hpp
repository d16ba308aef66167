// Non-learned references: the zero-filled adjoint reconstruction and a
// classical POCS-style iteration (projected Landweber with the hard
// lambda = 0 consistency projection).
#pragma once

#include <vector>

#include "mrdc/dc.hpp"
#include "mrdc/encoding.hpp"

namespace mrdc {

/// adjoint_op(s_0, maps, mask): the standard aliased baseline.
ComplexImage zero_filled(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                         const SamplingMask& mask);

struct PocsenseResult {
    ComplexImage image;
    std::vector<double> residuals;  // ||E x - s_0|| after each iteration
};

/// x <- project(x - step * E^H (E x - s_0)), starting from the zero-filled
/// image. step must lie in (0, 1] for the residual trace to stay
/// non-increasing (||E|| <= 1); the trace is verified on every run.
PocsenseResult pocsense_iterate(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                                const SamplingMask& mask, int iters, double step = 1.0);

}  // namespace mrdc
