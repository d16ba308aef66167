#include "mrdc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrdc/rng.hpp"

namespace mrdc {

bool SamplingMask::is_sampled(int line) const {
    return std::binary_search(sampled_lines.begin(), sampled_lines.end(), line);
}

std::vector<std::uint8_t> SamplingMask::line_flags() const {
    std::vector<std::uint8_t> flags(height, 0);
    for (int line : sampled_lines) flags[line] = 1;
    return flags;
}

SamplingMask SamplingMask::full(int height, int width) {
    SamplingMask mask;
    mask.height = height;
    mask.width = width;
    mask.sampled_lines.resize(height);
    for (int i = 0; i < height; ++i) mask.sampled_lines[i] = i;
    return mask;
}

SamplingMask generate_mask(int height, int width, double af, int calib,
                           std::uint64_t seed) {
    if (height < 1 || width < 1) throw std::invalid_argument("generate_mask: bad dims");
    if (calib < 0 || calib > height)
        throw std::invalid_argument("generate_mask: calib outside [0, height]");
    if (af < 1.0) throw std::invalid_argument("generate_mask: af must be >= 1");

    const int total = static_cast<int>(std::llround(height / af));
    if (total < calib)
        throw std::invalid_argument(
            "generate_mask: round(height/af) < calib; fewer lines than the "
            "calibration region");

    const int calib_start = height / 2 - calib / 2;
    std::vector<std::uint8_t> chosen(height, 0);
    for (int i = 0; i < calib; ++i) chosen[calib_start + i] = 1;

    std::vector<int> rest;
    rest.reserve(height - calib);
    for (int i = 0; i < height; ++i)
        if (!chosen[i]) rest.push_back(i);

    // partial Fisher-Yates: the first (total - calib) entries of rest
    Rng rng(seed);
    const int extra = total - calib;
    for (int i = 0; i < extra; ++i) {
        const auto j = i + static_cast<int>(rng.bounded(rest.size() - i));
        std::swap(rest[i], rest[j]);
        chosen[rest[i]] = 1;
    }

    SamplingMask mask;
    mask.height = height;
    mask.width = width;
    mask.seed = seed;
    mask.sampled_lines.reserve(total);
    for (int i = 0; i < height; ++i)
        if (chosen[i]) mask.sampled_lines.push_back(i);
    return mask;
}

MultiCoilKSpace apply_mask(const MultiCoilKSpace& ksp, const SamplingMask& mask) {
    if (ksp.height != mask.height || ksp.width != mask.width)
        throw std::invalid_argument("apply_mask: mask/k-space shape mismatch");

    MultiCoilKSpace out(ksp.n_coil, ksp.height, ksp.width);
    const auto flags = mask.line_flags();
    for (int c = 0; c < ksp.n_coil; ++c) {
        for (int y = 0; y < ksp.height; ++y) {
            if (!flags[y]) continue;
            for (int x = 0; x < ksp.width; ++x) out.at(c, y, x) = ksp.at(c, y, x);
        }
    }
    return out;
}

}  // namespace mrdc
