#include "mrdc/denoiser.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "mrdc/rng.hpp"

namespace mrdc {

namespace {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using ConstMapRM = Eigen::Map<const MatrixRM>;

int same_pad(const ConvLayer& layer) { return (layer.kernel - 1) * layer.dilation / 2; }

// im2col: column p = (y,x) holds the receptive field of output pixel p,
// rows indexed by (ic, ky, kx). Out-of-frame taps are zero.
MatrixRM im2col(const RealTensor& input, const ConvLayer& layer) {
    const int h = input.height;
    const int w = input.width;
    const int k = layer.kernel;
    const int d = layer.dilation;
    const int pad = same_pad(layer);
    const std::size_t taps = static_cast<std::size_t>(k) * k;
    MatrixRM cols(static_cast<std::size_t>(layer.in_ch) * taps,
                  static_cast<std::size_t>(h) * w);

    for (int ic = 0; ic < layer.in_ch; ++ic) {
        const double* src = input.channel(ic);
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const std::size_t row = (static_cast<std::size_t>(ic) * k + ky) * k + kx;
                double* dst = cols.data() + row * cols.cols();
                const int dy = ky * d - pad;
                const int dx = kx * d - pad;
                for (int y = 0; y < h; ++y) {
                    const int iy = y + dy;
                    double* out_row = dst + static_cast<std::size_t>(y) * w;
                    if (iy < 0 || iy >= h) {
                        std::fill(out_row, out_row + w, 0.0);
                        continue;
                    }
                    const double* in_row = src + static_cast<std::size_t>(iy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int ix = x + dx;
                        out_row[x] = (ix >= 0 && ix < w) ? in_row[ix] : 0.0;
                    }
                }
            }
        }
    }
    return cols;
}

// scatter-add transpose of im2col
void col2im_add(const MatrixRM& cols, const ConvLayer& layer, RealTensor& out) {
    const int h = out.height;
    const int w = out.width;
    const int k = layer.kernel;
    const int d = layer.dilation;
    const int pad = same_pad(layer);

    for (int ic = 0; ic < layer.in_ch; ++ic) {
        double* dst = out.channel(ic);
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const std::size_t row = (static_cast<std::size_t>(ic) * k + ky) * k + kx;
                const double* src = cols.data() + row * cols.cols();
                const int dy = ky * d - pad;
                const int dx = kx * d - pad;
                for (int y = 0; y < h; ++y) {
                    const int iy = y + dy;
                    if (iy < 0 || iy >= h) continue;
                    const double* src_row = src + static_cast<std::size_t>(y) * w;
                    double* dst_row = dst + static_cast<std::size_t>(iy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int ix = x + dx;
                        if (ix >= 0 && ix < w) dst_row[ix] += src_row[x];
                    }
                }
            }
        }
    }
}

void check_conv_input(const RealTensor& input, const ConvLayer& layer) {
    if (input.channels != layer.in_ch)
        throw std::invalid_argument("conv2d: channel count mismatch");
    if (layer.kernel < 1 || layer.kernel % 2 == 0)
        throw std::invalid_argument("conv2d: kernel size must be odd");
    if (layer.dilation < 1) throw std::invalid_argument("conv2d: dilation must be >= 1");
}

}  // namespace

RealTensor conv2d_dilated(const RealTensor& input, const ConvLayer& layer) {
    check_conv_input(input, layer);
    const std::size_t pixels = input.plane_size();
    const std::size_t taps =
        static_cast<std::size_t>(layer.in_ch) * layer.kernel * layer.kernel;

    RealTensor out(layer.out_ch, input.height, input.width);
    const MatrixRM cols = im2col(input, layer);
    ConstMapRM wmat(layer.weights.data(), layer.out_ch, taps);
    MapRM omat(out.data.data(), layer.out_ch, pixels);
    omat.noalias() = wmat * cols;
    for (int oc = 0; oc < layer.out_ch; ++oc)
        omat.row(oc).array() += layer.bias[oc];
    return out;
}

RealTensor conv2d_backward_input(const RealTensor& grad_out, const ConvLayer& layer) {
    if (grad_out.channels != layer.out_ch)
        throw std::invalid_argument("conv2d_backward_input: channel mismatch");
    const std::size_t pixels = grad_out.plane_size();
    const std::size_t taps =
        static_cast<std::size_t>(layer.in_ch) * layer.kernel * layer.kernel;

    ConstMapRM wmat(layer.weights.data(), layer.out_ch, taps);
    ConstMapRM gmat(grad_out.data.data(), layer.out_ch, pixels);
    MatrixRM cols = wmat.transpose() * gmat;

    RealTensor grad_in(layer.in_ch, grad_out.height, grad_out.width);
    col2im_add(cols, layer, grad_in);
    return grad_in;
}

void conv2d_backward_params(const RealTensor& input, const RealTensor& grad_out,
                            const ConvLayer& layer, std::vector<double>& grad_weights,
                            std::vector<double>& grad_bias) {
    check_conv_input(input, layer);
    const std::size_t pixels = input.plane_size();
    const std::size_t taps =
        static_cast<std::size_t>(layer.in_ch) * layer.kernel * layer.kernel;

    const MatrixRM cols = im2col(input, layer);
    ConstMapRM gmat(grad_out.data.data(), layer.out_ch, pixels);
    MapRM gw(grad_weights.data(), layer.out_ch, taps);
    gw.noalias() += gmat * cols.transpose();
    for (int oc = 0; oc < layer.out_ch; ++oc)
        grad_bias[oc] += gmat.row(oc).sum();
}

SubnetParams init_params(int n_d, int n_filters, int n_img, int dilation,
                         std::uint64_t seed, int kernel) {
    if (n_d < 1) throw std::invalid_argument("init_params: n_d must be >= 1");
    if (n_img < 1 || n_filters < 1) throw std::invalid_argument("init_params: bad widths");
    if (kernel < 1 || kernel % 2 == 0)
        throw std::invalid_argument("init_params: kernel size must be odd");

    SubnetParams params;
    params.n_img = n_img;
    params.n_d = n_d;
    params.n_filters = n_filters;
    params.kernel = kernel;
    params.dilation = dilation;
    params.layers.resize(n_d);

    Rng rng(seed);
    const int io_ch = 2 * n_img;
    for (int l = 0; l < n_d; ++l) {
        ConvLayer& layer = params.layers[l];
        layer.in_ch = (l == 0) ? io_ch : n_filters;
        layer.out_ch = (l == n_d - 1) ? io_ch : n_filters;
        layer.kernel = kernel;
        layer.dilation = (l == 0 || l == n_d - 1) ? 1 : dilation;
        const std::size_t fan_in = static_cast<std::size_t>(layer.in_ch) * kernel * kernel;
        const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
        layer.weights.resize(static_cast<std::size_t>(layer.out_ch) * fan_in);
        for (auto& wv : layer.weights) wv = stddev * rng.normal();
        layer.bias.assign(layer.out_ch, 0.0);
    }
    return params;
}

RealTensor to_channels(const CoilStack& x) {
    RealTensor t(2 * x.n_coil, x.height, x.width);
    const std::size_t plane = x.plane_size();
    for (int c = 0; c < x.n_coil; ++c) {
        double* re = t.channel(2 * c);
        double* im = t.channel(2 * c + 1);
        const cplx* src = x.data.data() + c * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            re[p] = src[p].real();
            im[p] = src[p].imag();
        }
    }
    return t;
}

CoilStack from_channels(const RealTensor& t) {
    if (t.channels % 2 != 0)
        throw std::invalid_argument("from_channels: channel count must be even");
    CoilStack x(t.channels / 2, t.height, t.width);
    const std::size_t plane = x.plane_size();
    for (int c = 0; c < x.n_coil; ++c) {
        const double* re = t.channel(2 * c);
        const double* im = t.channel(2 * c + 1);
        cplx* dst = x.data.data() + c * plane;
        for (std::size_t p = 0; p < plane; ++p) dst[p] = cplx(re[p], im[p]);
    }
    return x;
}

namespace {

void check_subnet_input(const CoilStack& x, const SubnetParams& params) {
    if (x.n_coil != params.n_img)
        throw std::invalid_argument("subnet_forward: plane count mismatch");
    if (params.layers.empty()) throw std::invalid_argument("subnet_forward: empty subnet");
}

void relu_inplace(RealTensor& t) {
    for (auto& v : t.data)
        if (v < 0.0) v = 0.0;
}

}  // namespace

CoilStack subnet_forward(const CoilStack& x, const SubnetParams& params) {
    SubnetCache cache;
    return subnet_forward_cached(x, params, cache);
}

CoilStack subnet_forward_cached(const CoilStack& x, const SubnetParams& params,
                                SubnetCache& cache) {
    check_subnet_input(x, params);
    cache.acts.clear();
    cache.acts.reserve(params.layers.size() + 1);
    cache.acts.push_back(to_channels(x));

    const int last = static_cast<int>(params.layers.size()) - 1;
    for (int l = 0; l <= last; ++l) {
        RealTensor z = conv2d_dilated(cache.acts.back(), params.layers[l]);
        if (l != last) relu_inplace(z);
        cache.acts.push_back(std::move(z));
    }

    CoilStack out = from_channels(cache.acts.back());
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += x.data[i];
    return out;
}

CoilStack subnet_backward(const CoilStack& grad_out, const SubnetParams& params,
                          const SubnetCache& cache, SubnetParams& grads) {
    const int last = static_cast<int>(params.layers.size()) - 1;
    RealTensor g = to_channels(grad_out);

    for (int l = last; l >= 0; --l) {
        if (l != last) {
            // ReLU: acts[l+1] is the post-activation output of layer l
            const RealTensor& a = cache.acts[l + 1];
            for (std::size_t i = 0; i < g.data.size(); ++i)
                if (a.data[i] <= 0.0) g.data[i] = 0.0;
        }
        conv2d_backward_params(cache.acts[l], g, params.layers[l],
                               grads.layers[l].weights, grads.layers[l].bias);
        g = conv2d_backward_input(g, params.layers[l]);
    }

    // residual branch
    CoilStack grad_in = from_channels(g);
    for (std::size_t i = 0; i < grad_in.data.size(); ++i)
        grad_in.data[i] += grad_out.data[i];
    return grad_in;
}

SubnetParams zeros_like(const SubnetParams& params) {
    SubnetParams z = params;
    for (auto& layer : z.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    return z;
}

}  // namespace mrdc
