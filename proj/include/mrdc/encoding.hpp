// The SENSE encoding operator E and its adjoint E^H:
//   E x   = apply_mask(fft2c(expand(x, maps)), mask)
//   E^H s = combine(ifft2c(apply_mask(s, mask)), maps)
// With RSS-normalized maps and a unitary FFT, ||E|| <= 1 and the pair is
// exactly adjoint.
#pragma once

#include "mrdc/coils.hpp"
#include "mrdc/core.hpp"
#include "mrdc/sampling.hpp"

namespace mrdc {

MultiCoilKSpace forward_op(const ComplexImage& x, const SensitivityMaps& maps,
                           const SamplingMask& mask);

ComplexImage adjoint_op(const MultiCoilKSpace& s, const SensitivityMaps& maps,
                        const SamplingMask& mask);

}  // namespace mrdc
