#include "mrdc/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mrdc/parallel.hpp"
#include "mrdc/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written as raw little-endian floats");

using json = nlohmann::json;

namespace mrdc {

double loss_recombined(const ComplexImage& pred, const ComplexImage& truth) {
    if (pred.height != truth.height || pred.width != truth.width)
        throw std::invalid_argument("loss_recombined: shape mismatch");
    double acc = 0.0;
    for (std::size_t p = 0; p < pred.data.size(); ++p)
        acc += std::norm(truth.data[p] - pred.data[p]);
    return acc;
}

double loss_coilwise(const MultiCoilImage& pred, const MultiCoilImage& truth,
                     const SensitivityMaps& maps) {
    if (pred.n_coil != truth.n_coil || pred.height != truth.height ||
        pred.width != truth.width)
        throw std::invalid_argument("loss_coilwise: shape mismatch");
    if (pred.n_coil != maps.n_coil() || pred.height != maps.height() ||
        pred.width != maps.width())
        throw std::invalid_argument("loss_coilwise: maps shape mismatch");
    double acc = 0.0;
    const std::size_t plane = pred.plane_size();
    for (int c = 0; c < pred.n_coil; ++c)
        for (std::size_t p = 0; p < plane; ++p)
            acc += std::norm(maps.maps.data[c * plane + p]) *
                   std::norm(truth.data[c * plane + p] - pred.data[c * plane + p]);
    return acc;
}

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double percentile99(const std::vector<cplx>& data) {
    std::vector<double> mags(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) mags[i] = std::abs(data[i]);
    const auto idx = static_cast<std::size_t>(
        std::llround(0.99 * static_cast<double>(mags.size() - 1)));
    std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
    return mags[idx];
}

void scale_stack(CoilStack& stack, double factor) {
    for (auto& v : stack.data) v *= factor;
}

}  // namespace

TrainSample prepare_sample(const DatasetRecord& record, Variant variant,
                           const LoaderOptions& options) {
    TrainSample sample;
    sample.id = record.id;
    sample.protocol = record.protocol;
    if (options.af > 0.0) {
        sample.mask = generate_mask(record.kspace_full.height, record.kspace_full.width,
                                    options.af, options.calib,
                                    mix_seed(record.seed, options.mask_salt));
    } else {
        sample.mask = record.mask;
    }

    MultiCoilKSpace s0 = apply_mask(record.kspace_full, sample.mask);
    sample.maps = estimate_sensitivities(s0, sample.mask, options.calib);

    // per-sample intensity normalization by the 99th-percentile magnitude of
    // the network input; undone at evaluation via sample.scale
    if (variant == Variant::DPocsense) {
        const ComplexImage x_u = adjoint_op(s0, sample.maps, sample.mask);
        sample.scale = percentile99(x_u.data);
    } else {
        const MultiCoilImage x_u = ifft2c(s0);
        sample.scale = percentile99(x_u.data);
    }
    if (!(sample.scale > 0.0)) sample.scale = 1.0;

    const double inv = 1.0 / sample.scale;
    scale_stack(s0, inv);
    sample.s0 = std::move(s0);

    MultiCoilImage full_coils = ifft2c(record.kspace_full);
    sample.truth_img = combine(full_coils, sample.maps);
    for (auto& v : sample.truth_img.data) v *= inv;
    scale_stack(full_coils, inv);
    sample.truth_coils = std::move(full_coils);
    return sample;
}

namespace {

// backward of the Omega blend: grad w.r.t. s_cnn keeps lambda on sampled
// lines and passes through elsewhere; the lambda gradient accumulates
// Re<g, s_cnn - s_0> over sampled samples.
void dc_blend_backward(const MultiCoilKSpace& grad_out, const MultiCoilKSpace& s_cnn,
                       const MultiCoilKSpace& s_0, const SamplingMask& mask,
                       double lambda, MultiCoilKSpace& grad_s_cnn,
                       double& grad_lambda) {
    grad_s_cnn = grad_out;
    double acc = 0.0;
    for (int c = 0; c < grad_out.n_coil; ++c) {
        for (int line : mask.sampled_lines) {
            for (int x = 0; x < grad_out.width; ++x) {
                const cplx g = grad_out.at(c, line, x);
                const cplx diff = s_cnn.at(c, line, x) - s_0.at(c, line, x);
                acc += g.real() * diff.real() + g.imag() * diff.imag();
                grad_s_cnn.at(c, line, x) = lambda * g;
            }
        }
    }
    grad_lambda += acc;
}

struct SampleGrad {
    CascadeGrads grads;
    double loss = 0.0;
};

SampleGrad sample_gradient_dpocsense(const CascadeModel& model,
                                     const TrainSample& sample) {
    SampleGrad result{zeros_like(model), 0.0};
    DpocsenseTrace trace =
        dpocsense_forward_traced(sample.s0, sample.maps, sample.mask, model);
    result.loss = loss_recombined(trace.output(), sample.truth_img);

    ComplexImage grad_x(model.height, model.width);
    for (std::size_t p = 0; p < grad_x.data.size(); ++p)
        grad_x.data[p] = 2.0 * (trace.output().data[p] - sample.truth_img.data[p]);

    for (int t = model.n_c - 1; t >= 0; --t) {
        const DpocsenseStage& stage = trace.stages[t];
        // x = combine(ifft2c(s_dc)); adjoint is fft2c(expand(.))
        MultiCoilKSpace grad_sdc = fft2c(expand(grad_x, sample.maps));

        MultiCoilKSpace grad_scnn;
        double grad_lambda = 0.0;
        dc_blend_backward(grad_sdc, stage.s_cnn, sample.s0, sample.mask,
                          model.dc_params[t].lambda(), grad_scnn, grad_lambda);
        // chain through lambda = sigmoid(raw)
        const double lam = model.dc_params[t].lambda();
        result.grads.raw_lambda[t] += grad_lambda * lam * (1.0 - lam);

        // s_cnn = fft2c(expand(x_tilde)); adjoint is combine(ifft2c(.))
        ComplexImage grad_xtilde = combine(ifft2c(grad_scnn), sample.maps);

        CoilStack grad_in = subnet_backward(CoilStack::from_image(grad_xtilde),
                                            model.subnets[t], stage.subnet,
                                            result.grads.subnets[t]);
        grad_x = grad_in.plane(0);
    }
    return result;
}

SampleGrad sample_gradient_dccnn(const CascadeModel& model, const TrainSample& sample) {
    SampleGrad result{zeros_like(model), 0.0};
    DccnnTrace trace = dccnn_forward_traced(sample.s0, sample.mask, model);
    result.loss = loss_coilwise(trace.output(), sample.truth_coils, sample.maps);

    const std::size_t plane = sample.s0.plane_size();
    MultiCoilImage grad_x(model.n_coil, model.height, model.width);
    for (int c = 0; c < model.n_coil; ++c)
        for (std::size_t p = 0; p < plane; ++p) {
            const double w = std::norm(sample.maps.maps.data[c * plane + p]);
            grad_x.data[c * plane + p] =
                2.0 * w *
                (trace.output().data[c * plane + p] - sample.truth_coils.data[c * plane + p]);
        }

    for (int t = model.n_c - 1; t >= 0; --t) {
        const DccnnStage& stage = trace.stages[t];
        // x = ifft2c(s_dc) per coil; adjoint is fft2c
        MultiCoilKSpace grad_sdc = fft2c(grad_x);

        MultiCoilKSpace grad_scnn;
        double grad_lambda = 0.0;
        dc_blend_backward(grad_sdc, stage.s_cnn, sample.s0, sample.mask,
                          model.dc_params[t].lambda(), grad_scnn, grad_lambda);
        const double lam = model.dc_params[t].lambda();
        result.grads.raw_lambda[t] += grad_lambda * lam * (1.0 - lam);

        MultiCoilImage grad_xtilde = ifft2c(grad_scnn);
        grad_x = subnet_backward(grad_xtilde, model.subnets[t], stage.subnet,
                                 result.grads.subnets[t]);
    }
    return result;
}

}  // namespace

GradResult compute_gradients(const CascadeModel& model,
                             const std::vector<const TrainSample*>& batch,
                             LossVariant loss) {
    if (batch.empty()) throw std::invalid_argument("compute_gradients: empty batch");
    if (loss == LossVariant::Recombined && model.variant != Variant::DPocsense)
        throw std::invalid_argument("recombined loss needs a D-POCSENSE model");
    if (loss == LossVariant::Coilwise && model.variant != Variant::DcCnn)
        throw std::invalid_argument("coil-wise loss needs a DC-CNN model");

    std::vector<SampleGrad> partials(batch.size());
    parallel_for(batch.size(), [&](std::size_t i) {
        partials[i] = (loss == LossVariant::Recombined)
                          ? sample_gradient_dpocsense(model, *batch[i])
                          : sample_gradient_dccnn(model, *batch[i]);
    });

    GradResult result{zeros_like(model), 0.0};
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const auto& partial : partials) {  // fixed reduction order
        result.grads.axpy(inv_batch, partial.grads);
        result.loss += inv_batch * partial.loss;
    }
    for (std::size_t t = 0; t < model.dc_params.size(); ++t)
        if (!model.dc_params[t].trainable) result.grads.raw_lambda[t] = 0.0;

    if (!std::isfinite(result.loss)) {
        std::ostringstream msg;
        msg << "non-finite loss " << result.loss << " over batch of " << batch.size()
            << " (first id: " << batch.front()->id << "); lambdas:";
        for (const auto& dc : model.dc_params) msg << " " << dc.lambda();
        throw TrainingError(msg.str());
    }
    return result;
}

AdamState AdamState::for_model(const CascadeModel& model) {
    AdamState state;
    state.m.assign(param_count(model), 0.0);
    state.v.assign(param_count(model), 0.0);
    return state;
}

void adam_step(CascadeModel& model, const CascadeGrads& grads, AdamState& state,
               double lr) {
    auto model_spans = param_spans(model);
    auto grad_spans = param_spans(grads);
    if (model_spans.size() != grad_spans.size())
        throw std::invalid_argument("adam_step: gradient layout mismatch");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    std::size_t offset = 0;
    for (std::size_t s = 0; s < model_spans.size(); ++s) {
        auto params = model_spans[s];
        auto gspan = grad_spans[s];
        if (params.size() != gspan.size())
            throw std::invalid_argument("adam_step: span shape mismatch");
        if (offset + params.size() > state.m.size())
            throw std::invalid_argument("adam_step: state smaller than model");
        for (std::size_t i = 0; i < params.size(); ++i) {
            double& m = state.m[offset + i];
            double& v = state.v[offset + i];
            const double g = gspan[i];
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g * g;
            const double m_hat = m / bc1;
            const double v_hat = v / bc2;
            params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
        offset += params.size();
    }
    if (offset != state.m.size())
        throw std::invalid_argument("adam_step: state larger than model");
}

TrainResult train(CascadeModel& model, const std::vector<DatasetRecord>& records,
                  const TrainConfig& config) {
    if (records.empty()) throw std::invalid_argument("train: empty dataset");
    if (config.batch < 1) throw std::invalid_argument("train: batch must be >= 1");
    if (!(config.lr >= 0.0)) throw std::invalid_argument("train: bad learning rate");

    const LossVariant loss = model.variant == Variant::DPocsense
                                 ? LossVariant::Recombined
                                 : LossVariant::Coilwise;

    auto prepare_all = [&](std::uint64_t mask_salt) {
        std::vector<TrainSample> samples(records.size());
        LoaderOptions options = config.loader;
        options.mask_salt = mask_salt;
        parallel_for(records.size(), [&](std::size_t i) {
            samples[i] = prepare_sample(records[i], model.variant, options);
        });
        return samples;
    };

    std::vector<TrainSample> samples = prepare_all(config.loader.mask_salt);

    AdamState adam = AdamState::for_model(model);
    TrainResult result;
    result.epoch_loss.reserve(config.epochs);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.resample_masks && epoch > 1) {
            if (config.loader.af <= 0.0)
                throw std::invalid_argument("train: resampling masks needs an af");
            samples = prepare_all(mix_seed(config.loader.mask_salt, epoch));
        }

        Rng shuffle_rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            std::vector<const TrainSample*> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(&samples[order[i]]);

            GradResult grad = compute_gradients(model, batch, loss);
            epoch_loss += grad.loss * static_cast<double>(batch.size());
            seen += batch.size();
            adam_step(model, grad.grads, adam, config.lr);
        }
        epoch_loss /= static_cast<double>(seen);
        result.epoch_loss.push_back(epoch_loss);

        if (config.verbose)
            std::fprintf(stderr, "epoch %4d/%d  loss %.6e\n", epoch, config.epochs,
                         epoch_loss);

        if (!config.checkpoint_path.empty() && config.checkpoint_every > 0 &&
            epoch % config.checkpoint_every == 0 && epoch != config.epochs) {
            save_checkpoint(model, config.checkpoint_path,
                            {epoch, config.seed, config.precision});
        }
    }

    if (!config.checkpoint_path.empty())
        save_checkpoint(model, config.checkpoint_path,
                        {config.epochs, config.seed, config.precision});
    return result;
}

namespace {

constexpr char kMagic[4] = {'M', 'R', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_checkpoint(const CascadeModel& model, const std::string& path,
                     const CheckpointMeta& meta) {
    if (meta.precision != "float32" && meta.precision != "float64")
        throw std::invalid_argument("save_checkpoint: precision must be float32/float64");

    json header;
    header["variant"] = variant_name(model.variant);
    header["n_c"] = model.n_c;
    header["n_d"] = model.n_d;
    header["n_filters"] = model.n_filters;
    header["n_coil"] = model.n_coil;
    header["dims"] = {model.height, model.width};
    header["kernel"] = model.kernel;
    header["dilation"] = model.dilation;
    header["precision"] = meta.precision;
    header["epoch"] = meta.epoch;
    header["seed"] = meta.seed;
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::FileAccess, "cannot open " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

    for (auto span : param_spans(model)) {
        if (meta.precision == "float64") {
            out.write(reinterpret_cast<const char*>(span.data()),
                      static_cast<std::streamsize>(span.size() * sizeof(double)));
        } else {
            std::vector<float> narrow(span.begin(), span.end());
            out.write(reinterpret_cast<const char*>(narrow.data()),
                      static_cast<std::streamsize>(narrow.size() * sizeof(float)));
        }
    }
    if (!out) throw IoError(IoError::Kind::FileAccess, "short write to " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::FileAccess, "cannot open " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(IoError::Kind::VersionMismatch, path + ": bad checkpoint magic");
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (!in || version != kVersion)
        throw IoError(IoError::Kind::VersionMismatch,
                      path + ": unsupported checkpoint version " + std::to_string(version));
    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    if (!in || header_len > (1ULL << 20))
        throw IoError(IoError::Kind::MalformedHeader, path + ": implausible header length");
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError(IoError::Kind::TruncatedPayload, path + ": truncated header");

    LoadedCheckpoint loaded;
    try {
        const json header = json::parse(header_text);
        const auto dims = header.at("dims").get<std::vector<int>>();
        if (dims.size() != 2)
            throw IoError(IoError::Kind::MalformedHeader, path + ": dims must be [H, W]");
        loaded.model = make_cascade(
            variant_from_name(header.at("variant").get<std::string>()),
            header.at("n_c").get<int>(), header.at("n_d").get<int>(),
            header.at("n_filters").get<int>(), header.at("n_coil").get<int>(), dims[0],
            dims[1], /*seed=*/0, header.at("kernel").get<int>(),
            header.at("dilation").get<int>());
        loaded.meta.precision = header.at("precision").get<std::string>();
        loaded.meta.epoch = header.at("epoch").get<int>();
        loaded.meta.seed = header.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw IoError(IoError::Kind::MalformedHeader, path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(IoError::Kind::MalformedHeader, path + ": " + e.what());
    }
    if (loaded.meta.precision != "float32" && loaded.meta.precision != "float64")
        throw IoError(IoError::Kind::MalformedHeader, path + ": unknown precision");

    const bool wide = loaded.meta.precision == "float64";
    for (auto span : param_spans(loaded.model)) {
        if (wide) {
            in.read(reinterpret_cast<char*>(span.data()),
                    static_cast<std::streamsize>(span.size() * sizeof(double)));
        } else {
            std::vector<float> narrow(span.size());
            in.read(reinterpret_cast<char*>(narrow.data()),
                    static_cast<std::streamsize>(narrow.size() * sizeof(float)));
            for (std::size_t i = 0; i < span.size(); ++i)
                span[i] = static_cast<double>(narrow[i]);
        }
        if (!in)
            throw IoError(IoError::Kind::TruncatedPayload,
                          path + ": truncated parameter payload");
    }
    in.peek();
    if (!in.eof())
        throw IoError(IoError::Kind::MalformedHeader, path + ": trailing bytes after payload");
    return loaded;
}

}  // namespace mrdc
