// Data-consistency layers: blend network-predicted k-space with the acquired
// samples on the sampled lines,
//   s'(k) = lambda * s_cnn(k) + (1 - lambda) * s_0(k)   for k in Omega
//   s'(k) = s_cnn(k)                                    otherwise
// used per coil (DC-CNN) or wrapped in encode/recombine (D-POCSENSE).
#pragma once

#include <cmath>

#include "mrdc/coils.hpp"
#include "mrdc/core.hpp"
#include "mrdc/sampling.hpp"

namespace mrdc {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Trainable blending weight, kept in (0,1) by a sigmoid over an
/// unconstrained raw scalar.
struct DcParam {
    double raw = 0.0;
    bool trainable = true;

    double lambda() const { return sigmoid(raw); }
    static DcParam from_lambda(double lam, bool trainable = true) {
        return DcParam{logit(lam), trainable};
    }
};

/// Per-coil k-space blend (the DC-CNN consistency layer).
MultiCoilKSpace dc_percoil(const MultiCoilKSpace& s_cnn, const MultiCoilKSpace& s_0,
                           const SamplingMask& mask, double lambda);

/// Encode the image estimate, blend against the acquired samples, then
/// recombine through the *unmasked* inverse so the CNN's estimates of the
/// unacquired frequencies survive (the D-POCSENSE consistency layer).
ComplexImage dc_combined(const ComplexImage& x_cnn, const MultiCoilKSpace& s_0,
                         const SensitivityMaps& maps, const SamplingMask& mask,
                         double lambda);

/// The blended per-coil k-space inside dc_combined, before recombination.
/// This intermediate is where the consistency statement is exact: at
/// lambda = 0 it equals s_0 on the sampled lines to machine precision.
MultiCoilKSpace dc_combined_kspace(const ComplexImage& x_cnn,
                                   const MultiCoilKSpace& s_0,
                                   const SensitivityMaps& maps,
                                   const SamplingMask& mask, double lambda);

}  // namespace mrdc
