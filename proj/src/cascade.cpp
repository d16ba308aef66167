#include "mrdc/cascade.hpp"

#include <stdexcept>

namespace mrdc {

std::string variant_name(Variant v) {
    return v == Variant::DPocsense ? "dpocsense" : "dccnn";
}

Variant variant_from_name(const std::string& name) {
    if (name == "dpocsense") return Variant::DPocsense;
    if (name == "dccnn") return Variant::DcCnn;
    throw std::invalid_argument("unknown variant: " + name);
}

CascadeModel make_cascade(Variant variant, int n_c, int n_d, int n_filters,
                          int n_coil, int height, int width, std::uint64_t seed,
                          int kernel, int dilation, double lambda_init) {
    if (n_c < 1) throw std::invalid_argument("make_cascade: n_c must be >= 1");
    if (n_coil < 1) throw std::invalid_argument("make_cascade: n_coil must be >= 1");

    CascadeModel model;
    model.variant = variant;
    model.n_c = n_c;
    model.n_d = n_d;
    model.n_filters = n_filters;
    model.n_coil = n_coil;
    model.height = height;
    model.width = width;
    model.kernel = kernel;
    model.dilation = dilation;
    model.subnets.reserve(n_c);
    for (int t = 0; t < n_c; ++t) {
        model.subnets.push_back(
            init_params(n_d, n_filters, model.n_img(), dilation, seed + t, kernel));
        model.dc_params.push_back(DcParam::from_lambda(lambda_init));
    }
    return model;
}

namespace {

template <typename Layers, typename Span>
void append_subnet_spans(Layers& subnets, std::vector<Span>& spans) {
    for (auto& subnet : subnets) {
        for (auto& layer : subnet.layers) {
            spans.emplace_back(layer.weights);
            spans.emplace_back(layer.bias);
        }
    }
}

}  // namespace

std::vector<std::span<double>> param_spans(CascadeModel& model) {
    std::vector<std::span<double>> spans;
    append_subnet_spans(model.subnets, spans);
    for (auto& dc : model.dc_params) spans.emplace_back(&dc.raw, 1);
    return spans;
}

std::vector<std::span<const double>> param_spans(const CascadeModel& model) {
    std::vector<std::span<const double>> spans;
    append_subnet_spans(model.subnets, spans);
    for (const auto& dc : model.dc_params) spans.emplace_back(&dc.raw, 1);
    return spans;
}

std::size_t param_count(const CascadeModel& model) {
    std::size_t count = 0;
    for (const auto& subnet : model.subnets)
        for (const auto& layer : subnet.layers)
            count += layer.weights.size() + layer.bias.size();
    return count + model.dc_params.size();
}

void CascadeGrads::zero() {
    for (auto& subnet : subnets)
        for (auto& layer : subnet.layers) {
            std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
            std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
        }
    std::fill(raw_lambda.begin(), raw_lambda.end(), 0.0);
}

void CascadeGrads::axpy(double alpha, const CascadeGrads& other) {
    for (std::size_t t = 0; t < subnets.size(); ++t)
        for (std::size_t l = 0; l < subnets[t].layers.size(); ++l) {
            auto& dst = subnets[t].layers[l];
            const auto& src = other.subnets[t].layers[l];
            for (std::size_t i = 0; i < dst.weights.size(); ++i)
                dst.weights[i] += alpha * src.weights[i];
            for (std::size_t i = 0; i < dst.bias.size(); ++i)
                dst.bias[i] += alpha * src.bias[i];
        }
    for (std::size_t t = 0; t < raw_lambda.size(); ++t)
        raw_lambda[t] += alpha * other.raw_lambda[t];
}

void CascadeGrads::scale(double alpha) {
    for (auto& subnet : subnets)
        for (auto& layer : subnet.layers) {
            for (auto& v : layer.weights) v *= alpha;
            for (auto& v : layer.bias) v *= alpha;
        }
    for (auto& v : raw_lambda) v *= alpha;
}

CascadeGrads zeros_like(const CascadeModel& model) {
    CascadeGrads grads;
    grads.subnets.reserve(model.subnets.size());
    for (const auto& subnet : model.subnets) grads.subnets.push_back(zeros_like(subnet));
    grads.raw_lambda.assign(model.dc_params.size(), 0.0);
    return grads;
}

std::vector<std::span<double>> param_spans(CascadeGrads& grads) {
    std::vector<std::span<double>> spans;
    append_subnet_spans(grads.subnets, spans);
    for (auto& raw : grads.raw_lambda) spans.emplace_back(&raw, 1);
    return spans;
}

std::vector<std::span<const double>> param_spans(const CascadeGrads& grads) {
    std::vector<std::span<const double>> spans;
    append_subnet_spans(grads.subnets, spans);
    for (const auto& raw : grads.raw_lambda) spans.emplace_back(&raw, 1);
    return spans;
}

namespace {

void check_dpocsense_args(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                          const SamplingMask& mask, const CascadeModel& model) {
    if (model.variant != Variant::DPocsense)
        throw std::invalid_argument("dpocsense_forward: model variant mismatch");
    if (s_0.n_coil != maps.n_coil() || s_0.height != maps.height() ||
        s_0.width != maps.width() || s_0.height != mask.height ||
        s_0.width != mask.width)
        throw std::invalid_argument("dpocsense_forward: shape mismatch");
}

void check_dccnn_args(const MultiCoilKSpace& s_0, const SamplingMask& mask,
                      const CascadeModel& model) {
    if (model.variant != Variant::DcCnn)
        throw std::invalid_argument("dccnn_forward: model variant mismatch");
    if (s_0.n_coil != model.n_coil)
        throw std::invalid_argument("dccnn_forward: coil count mismatch");
    if (s_0.height != mask.height || s_0.width != mask.width)
        throw std::invalid_argument("dccnn_forward: shape mismatch");
}

}  // namespace

DpocsenseTrace dpocsense_forward_traced(const MultiCoilKSpace& s_0,
                                        const SensitivityMaps& maps,
                                        const SamplingMask& mask,
                                        const CascadeModel& model) {
    check_dpocsense_args(s_0, maps, mask, model);

    DpocsenseTrace trace;
    trace.x0 = adjoint_op(s_0, maps, mask);
    trace.stages.resize(model.n_c);

    const ComplexImage* x = &trace.x0;
    for (int t = 0; t < model.n_c; ++t) {
        DpocsenseStage& stage = trace.stages[t];
        CoilStack x_in = CoilStack::from_image(*x);
        CoilStack denoised = subnet_forward_cached(x_in, model.subnets[t], stage.subnet);
        stage.x_tilde = denoised.plane(0);
        stage.s_cnn = fft2c(expand(stage.x_tilde, maps));
        stage.s_dc = dc_percoil(stage.s_cnn, s_0, mask, model.dc_params[t].lambda());
        stage.x = combine(ifft2c(stage.s_dc), maps);
        x = &stage.x;
    }
    return trace;
}

ComplexImage dpocsense_forward(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                               const SamplingMask& mask, const CascadeModel& model) {
    return dpocsense_forward_traced(s_0, maps, mask, model).output();
}

DccnnTrace dccnn_forward_traced(const MultiCoilKSpace& s_0, const SamplingMask& mask,
                                const CascadeModel& model) {
    check_dccnn_args(s_0, mask, model);

    DccnnTrace trace;
    trace.x0 = ifft2c(s_0);
    trace.stages.resize(model.n_c);

    const MultiCoilImage* x = &trace.x0;
    for (int t = 0; t < model.n_c; ++t) {
        DccnnStage& stage = trace.stages[t];
        stage.x_tilde = subnet_forward_cached(*x, model.subnets[t], stage.subnet);
        stage.s_cnn = fft2c(stage.x_tilde);
        stage.s_dc = dc_percoil(stage.s_cnn, s_0, mask, model.dc_params[t].lambda());
        stage.x = ifft2c(stage.s_dc);
        x = &stage.x;
    }
    return trace;
}

MultiCoilImage dccnn_forward(const MultiCoilKSpace& s_0, const SamplingMask& mask,
                             const CascadeModel& model) {
    return dccnn_forward_traced(s_0, mask, model).output();
}

}  // namespace mrdc
