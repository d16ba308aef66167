// Synthetic phantoms, acquisition simulation, and the on-disk dataset
// layout: one directory per record holding meta.json, kspace.cplx
// (little-endian float32 interleaved re/im, coil-major, row-major) and an
// optional sens.cplx with the same layout.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrdc/coils.hpp"
#include "mrdc/core.hpp"
#include "mrdc/errors.hpp"
#include "mrdc/sampling.hpp"

namespace mrdc {

struct DatasetRecord {
    std::string id;
    std::string protocol;
    MultiCoilKSpace kspace_full;  // unmasked, possibly noisy
    SamplingMask mask;            // acquisition mask
    std::optional<SensitivityMaps> ref_maps;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Adds intensity inside a rotated ellipse, accumulating into canvas
/// (row-major height x width).
void draw_ellipse(std::vector<double>& canvas, int height, int width, double center_y,
                  double center_x, double radius_y, double radius_x, double angle,
                  double intensity);

/// Random-ellipse phantom: intensities in [0.1, 1], additive overlap clipped
/// to [0, 1], smooth quadratic phase scaled by phase_scale.
ComplexImage make_phantom(int height, int width, std::uint64_t seed, int n_ellipses,
                          double phase_scale = 1.0);

/// The five synthetic acquisition protocols, "p0".."p4", with distinct
/// ellipse counts and phase roughness.
const std::vector<std::string>& protocol_tags();
ComplexImage protocol_phantom(int height, int width, const std::string& protocol,
                              std::uint64_t seed);

/// s_full = fft2c(expand(phantom, maps)) plus seeded complex Gaussian noise
/// with E|n|^2 = sigma^2 per sample. Masking happens at load time.
DatasetRecord simulate_acquisition(const ComplexImage& phantom,
                                   const SensitivityMaps& maps,
                                   const SamplingMask& mask, double noise_sigma,
                                   std::uint64_t seed);

/// Writes each record into dir/<id>/ (temp dir + rename). Payload round
/// trips bit-exactly.
void write_dataset(const std::vector<DatasetRecord>& records, const std::string& dir);

/// Reads every record directory under dir, sorted by id.
std::vector<DatasetRecord> read_dataset(const std::string& dir);

/// 16-bit binary PGM (P5) of the magnitude image, scaled to its own peak.
void write_pgm16(const std::string& path, const ComplexImage& img);

/// Headerless float32 re/im dump of one complex plane (same convention as
/// kspace.cplx).
void write_complex(const std::string& path, const ComplexImage& img);

}  // namespace mrdc
