// The two cascade networks: n_c denoising sub-networks interleaved with
// data-consistency layers. D-POCSENSE runs on the sensitivity-recombined
// image; DC-CNN runs calibration-less on the coil stack.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrdc/dc.hpp"
#include "mrdc/denoiser.hpp"
#include "mrdc/encoding.hpp"

namespace mrdc {

enum class Variant { DPocsense, DcCnn };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct CascadeModel {
    Variant variant = Variant::DPocsense;
    int n_c = 0;
    int n_d = 0;
    int n_filters = 0;
    int n_coil = 0;
    int height = 0;
    int width = 0;
    int kernel = 3;
    int dilation = 2;
    std::vector<SubnetParams> subnets;  // n_c entries
    std::vector<DcParam> dc_params;     // n_c entries

    int n_img() const { return variant == Variant::DPocsense ? 1 : n_coil; }
};

/// Fresh model: He-initialized subnets (seeded), every lambda at
/// sigmoid(raw) = 0.05.
CascadeModel make_cascade(Variant variant, int n_c, int n_d, int n_filters,
                          int n_coil, int height, int width, std::uint64_t seed,
                          int kernel = 3, int dilation = 2,
                          double lambda_init = 0.05);

/// Trainable parameter spans in checkpoint order: for each subnet, each
/// layer's weights then bias; then all raw lambdas.
std::vector<std::span<double>> param_spans(CascadeModel& model);
std::vector<std::span<const double>> param_spans(const CascadeModel& model);
std::size_t param_count(const CascadeModel& model);

/// Gradient holder shaped exactly like the model's trainable parameters.
struct CascadeGrads {
    std::vector<SubnetParams> subnets;
    std::vector<double> raw_lambda;

    void zero();
    void axpy(double alpha, const CascadeGrads& other);  // this += alpha * other
    void scale(double alpha);
};

CascadeGrads zeros_like(const CascadeModel& model);
std::vector<std::span<double>> param_spans(CascadeGrads& grads);
std::vector<std::span<const double>> param_spans(const CascadeGrads& grads);

ComplexImage dpocsense_forward(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                               const SamplingMask& mask, const CascadeModel& model);

MultiCoilImage dccnn_forward(const MultiCoilKSpace& s_0, const SamplingMask& mask,
                             const CascadeModel& model);

/// Per-stage intermediates kept for reverse mode and for consistency checks.
struct DpocsenseStage {
    SubnetCache subnet;
    ComplexImage x_tilde;   // subnet output
    MultiCoilKSpace s_cnn;  // fft2c(expand(x_tilde))
    MultiCoilKSpace s_dc;   // blended k-space (pre-recombination)
    ComplexImage x;         // stage output
};

struct DpocsenseTrace {
    ComplexImage x0;
    std::vector<DpocsenseStage> stages;
    const ComplexImage& output() const { return stages.back().x; }
};

struct DccnnStage {
    SubnetCache subnet;
    MultiCoilImage x_tilde;
    MultiCoilKSpace s_cnn;  // fft2c per coil of x_tilde
    MultiCoilKSpace s_dc;   // blended k-space
    MultiCoilImage x;       // ifft2c per coil
};

struct DccnnTrace {
    MultiCoilImage x0;
    std::vector<DccnnStage> stages;
    const MultiCoilImage& output() const { return stages.back().x; }
};

DpocsenseTrace dpocsense_forward_traced(const MultiCoilKSpace& s_0,
                                        const SensitivityMaps& maps,
                                        const SamplingMask& mask,
                                        const CascadeModel& model);

DccnnTrace dccnn_forward_traced(const MultiCoilKSpace& s_0, const SamplingMask& mask,
                                const CascadeModel& model);

}  // namespace mrdc
