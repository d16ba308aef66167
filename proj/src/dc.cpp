#include "mrdc/dc.hpp"

#include <stdexcept>

namespace mrdc {

namespace {

void check_blend_args(const MultiCoilKSpace& s_cnn, const MultiCoilKSpace& s_0,
                      const SamplingMask& mask, double lambda) {
    if (s_cnn.n_coil != s_0.n_coil || s_cnn.height != s_0.height ||
        s_cnn.width != s_0.width)
        throw std::invalid_argument("dc: s_cnn/s_0 shape mismatch");
    if (s_cnn.height != mask.height || s_cnn.width != mask.width)
        throw std::invalid_argument("dc: mask shape mismatch");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("dc: lambda outside [0,1]");
}

}  // namespace

MultiCoilKSpace dc_percoil(const MultiCoilKSpace& s_cnn, const MultiCoilKSpace& s_0,
                           const SamplingMask& mask, double lambda) {
    check_blend_args(s_cnn, s_0, mask, lambda);

    MultiCoilKSpace out = s_cnn;
    for (int c = 0; c < out.n_coil; ++c) {
        for (int line : mask.sampled_lines) {
            for (int x = 0; x < out.width; ++x) {
                out.at(c, line, x) =
                    lambda * s_cnn.at(c, line, x) + (1.0 - lambda) * s_0.at(c, line, x);
            }
        }
    }
    return out;
}

MultiCoilKSpace dc_combined_kspace(const ComplexImage& x_cnn,
                                   const MultiCoilKSpace& s_0,
                                   const SensitivityMaps& maps,
                                   const SamplingMask& mask, double lambda) {
    MultiCoilKSpace s = fft2c(expand(x_cnn, maps));
    return dc_percoil(s, s_0, mask, lambda);
}

ComplexImage dc_combined(const ComplexImage& x_cnn, const MultiCoilKSpace& s_0,
                         const SensitivityMaps& maps, const SamplingMask& mask,
                         double lambda) {
    return combine(ifft2c(dc_combined_kspace(x_cnn, s_0, maps, mask, lambda)), maps);
}

}  // namespace mrdc
