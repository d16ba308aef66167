// Cartesian phase-encode undersampling: mask generation and application.
// Masks index lines (rows) of centered k-space, so "central" lines are the
// low frequencies around row H/2.
#pragma once

#include <cstdint>
#include <vector>

#include "mrdc/core.hpp"

namespace mrdc {

struct SamplingMask {
    int height = 0;  // phase-encode line count
    int width = 0;   // readout samples per line
    std::vector<int> sampled_lines;  // sorted, unique
    std::uint64_t seed = 0;

    bool is_sampled(int line) const;
    std::vector<std::uint8_t> line_flags() const;  // height entries, 1 = sampled

    /// Fully sampled mask (every line acquired).
    static SamplingMask full(int height, int width);
};

/// Seeded Cartesian mask: the calib central lines plus
/// round(height/af) - calib lines drawn uniformly without replacement
/// from the remaining lines.
SamplingMask generate_mask(int height, int width, double af, int calib,
                           std::uint64_t seed);

/// Keeps sampled lines verbatim and zeroes everything else.
MultiCoilKSpace apply_mask(const MultiCoilKSpace& ksp, const SamplingMask& mask);

}  // namespace mrdc
