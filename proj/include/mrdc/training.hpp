// Reverse-mode differentiation through both cascades, the two losses, Adam,
// checkpoint serialization, and the training loop.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrdc/cascade.hpp"
#include "mrdc/data.hpp"

namespace mrdc {

enum class LossVariant { Recombined, Coilwise };

/// sum_p |truth(p) - pred(p)|^2
double loss_recombined(const ComplexImage& pred, const ComplexImage& truth);

/// sum_i sum_p |conj(C_i(p)) * (truth_i(p) - pred_i(p))|^2
double loss_coilwise(const MultiCoilImage& pred, const MultiCoilImage& truth,
                     const SensitivityMaps& maps);

/// One record readied for training/evaluation: masked normalized k-space,
/// calibration-estimated maps, and variant-appropriate targets.
struct TrainSample {
    std::string id;
    std::string protocol;
    MultiCoilKSpace s0;         // undersampled, divided by scale
    SamplingMask mask;
    SensitivityMaps maps;       // estimated from the calibration lines
    ComplexImage truth_img;     // recombined fully sampled target / scale
    MultiCoilImage truth_coils; // per-coil fully sampled targets / scale
    double scale = 1.0;         // 99th-percentile magnitude of the network input
};

struct LoaderOptions {
    double af = 0.0;  // 0 = keep the record's stored mask
    int calib = 24;
    std::uint64_t mask_salt = 0;  // mixed into regenerated mask seeds
};

TrainSample prepare_sample(const DatasetRecord& record, Variant variant,
                           const LoaderOptions& options);

struct GradResult {
    CascadeGrads grads;
    double loss = 0.0;  // batch mean
};

/// Exact reverse-mode gradients of the batch-mean loss w.r.t. every
/// trainable parameter. Throws TrainingError if the loss is non-finite.
GradResult compute_gradients(const CascadeModel& model,
                             const std::vector<const TrainSample*>& batch,
                             LossVariant loss);

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_model(const CascadeModel& model);
};

/// Standard Adam update with bias correction.
void adam_step(CascadeModel& model, const CascadeGrads& grads, AdamState& state,
               double lr);

struct TrainConfig {
    double lr = 1e-3;
    int epochs = 30;          // paper scale uses 200
    int batch = 4;
    std::uint64_t seed = 0;
    std::string precision = "float64";  // checkpoint payload width
    int checkpoint_every = 0;           // 0 = final checkpoint only
    std::string checkpoint_path;        // empty = never write
    bool resample_masks = false;        // fresh masks every epoch
    LoaderOptions loader;
    bool verbose = false;
};

struct TrainResult {
    std::vector<double> epoch_loss;
};

/// Seeded shuffled mini-batch training. The loss variant follows the model
/// variant (Eq-2 style for D-POCSENSE, coil-weighted for DC-CNN).
TrainResult train(CascadeModel& model, const std::vector<DatasetRecord>& records,
                  const TrainConfig& config);

/// Checkpoint file: magic "MRDC", u32 version, u64 JSON header length, JSON
/// header, then the parameter payload as little-endian float32/float64 in
/// declaration order (subnets by cascade position, each layer weights then
/// bias, then the raw-lambda array).
struct CheckpointMeta {
    int epoch = 0;
    std::uint64_t seed = 0;
    std::string precision = "float64";
};

void save_checkpoint(const CascadeModel& model, const std::string& path,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
    CascadeModel model;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace mrdc
