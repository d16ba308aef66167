// The denoising sub-network between data-consistency layers: complex planes
// split into real/imaginary channels, a stack of dilated 3x3 convolutions
// with ReLU between them, and a residual connection around the whole block.
// Backward passes live next to the forwards so the cascade can assemble
// exact reverse-mode gradients.
#pragma once

#include <cstdint>
#include <vector>

#include "mrdc/core.hpp"

namespace mrdc {

/// Dense real feature maps, channel-major.
struct RealTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    RealTensor() = default;
    RealTensor(int c, int h, int w)
        : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    double* channel(int c) { return data.data() + c * plane_size(); }
    const double* channel(int c) const { return data.data() + c * plane_size(); }
};

struct ConvLayer {
    int in_ch = 0;
    int out_ch = 0;
    int kernel = 3;
    int dilation = 1;
    std::vector<double> weights;  // [out_ch][in_ch][k][k], row-major
    std::vector<double> bias;     // [out_ch]
};

struct SubnetParams {
    int n_img = 1;      // complex planes in/out (1 for D-POCSENSE, n_coil for DC-CNN)
    int n_d = 0;        // conv layer count
    int n_filters = 0;  // hidden channel width
    int kernel = 3;
    int dilation = 2;   // hidden-layer dilation; first and last layers stay dense
    std::vector<ConvLayer> layers;
};

/// Zero-padded same-size dilated convolution (cross-correlation).
RealTensor conv2d_dilated(const RealTensor& input, const ConvLayer& layer);

/// Gradient of conv2d_dilated w.r.t. its input, weights, and bias.
/// grad_weights/grad_bias are accumulated into (callers zero them first).
RealTensor conv2d_backward_input(const RealTensor& grad_out, const ConvLayer& layer);
void conv2d_backward_params(const RealTensor& input, const RealTensor& grad_out,
                            const ConvLayer& layer, std::vector<double>& grad_weights,
                            std::vector<double>& grad_bias);

/// He-initialized parameters, zero biases, deterministic per seed.
/// Layer shapes: 2*n_img -> n_filters -> ... -> 2*n_img; dilation applies to
/// hidden layers only.
SubnetParams init_params(int n_d, int n_filters, int n_img, int dilation,
                         std::uint64_t seed, int kernel = 3);

/// x + cnn(x): split complex -> real channels, run the conv stack with ReLU
/// after all but the last layer, add the residual, merge back to complex.
CoilStack subnet_forward(const CoilStack& x, const SubnetParams& params);

/// Per-layer activations kept for the backward pass. acts[0] is the channel
/// split of the input; acts[l+1] is layer l's output after its ReLU (the
/// last layer keeps its pre-residual linear output).
struct SubnetCache {
    std::vector<RealTensor> acts;
};

CoilStack subnet_forward_cached(const CoilStack& x, const SubnetParams& params,
                                SubnetCache& cache);

/// Reverse-mode step through one sub-network. Returns the gradient w.r.t.
/// the complex input; parameter gradients accumulate into grads (shaped like
/// params, see zeros_like).
CoilStack subnet_backward(const CoilStack& grad_out, const SubnetParams& params,
                          const SubnetCache& cache, SubnetParams& grads);

SubnetParams zeros_like(const SubnetParams& params);

/// complex planes <-> stacked real channels (re, im per plane)
RealTensor to_channels(const CoilStack& x);
CoilStack from_channels(const RealTensor& t);

}  // namespace mrdc
