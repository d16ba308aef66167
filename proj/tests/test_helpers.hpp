#pragma once

#include "mrdc/core.hpp"
#include "mrdc/rng.hpp"

namespace mrdc::testing {

inline ComplexImage random_image(int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    ComplexImage img(h, w);
    for (auto& v : img.data) v = cplx(rng.normal(), rng.normal());
    return img;
}

inline CoilStack random_stack(int nc, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    CoilStack stack(nc, h, w);
    for (auto& v : stack.data) v = cplx(rng.normal(), rng.normal());
    return stack;
}

inline double max_abs_diff(const ComplexImage& a, const ComplexImage& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

inline double max_abs_diff(const CoilStack& a, const CoilStack& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

}  // namespace mrdc::testing
