#include "mrdc/encoding.hpp"

namespace mrdc {

MultiCoilKSpace forward_op(const ComplexImage& x, const SensitivityMaps& maps,
                           const SamplingMask& mask) {
    return apply_mask(fft2c(expand(x, maps)), mask);
}

ComplexImage adjoint_op(const MultiCoilKSpace& s, const SensitivityMaps& maps,
                        const SamplingMask& mask) {
    return combine(ifft2c(apply_mask(s, mask)), maps);
}

}  // namespace mrdc
