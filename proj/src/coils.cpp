#include "mrdc/coils.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mrdc/rng.hpp"

namespace mrdc {

SensitivityMaps simulate_sensitivities(int height, int width, int n_coil,
                                       std::uint64_t seed) {
    if (height < 1 || width < 1) throw std::invalid_argument("simulate_sensitivities: bad dims");
    if (n_coil < 1) throw std::invalid_argument("simulate_sensitivities: n_coil must be >= 1");

    Rng rng(seed);
    const double cy = 0.5 * (height - 1);
    const double cx = 0.5 * (width - 1);
    const double ring = 0.55 * std::min(height, width);
    const double sigma = 0.6 * std::min(height, width);
    const double angle0 = rng.uniform(0.0, 2.0 * std::numbers::pi);

    CoilStack maps(n_coil, height, width);
    for (int c = 0; c < n_coil; ++c) {
        const double angle = angle0 + 2.0 * std::numbers::pi * c / n_coil;
        const double coil_y = cy + ring * std::sin(angle);
        const double coil_x = cx + ring * std::cos(angle);
        // gentle linear phase ramp, different per coil
        const double ramp_y = rng.uniform(-1.5, 1.5) * std::numbers::pi / height;
        const double ramp_x = rng.uniform(-1.5, 1.5) * std::numbers::pi / width;
        const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dy = y - coil_y;
                const double dx = x - coil_x;
                const double mag = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
                const double phase = phase0 + ramp_y * y + ramp_x * x;
                maps.at(c, y, x) = std::polar(mag, phase);
            }
        }
    }

    // pixelwise RSS normalization; Gaussian profiles are strictly positive,
    // so the whole frame is support
    const std::size_t plane = maps.plane_size();
    for (std::size_t p = 0; p < plane; ++p) {
        double rss = 0.0;
        for (int c = 0; c < n_coil; ++c) rss += std::norm(maps.data[c * plane + p]);
        const double inv = 1.0 / std::sqrt(rss);
        for (int c = 0; c < n_coil; ++c) maps.data[c * plane + p] *= inv;
    }

    SensitivityMaps out;
    out.maps = std::move(maps);
    out.support.assign(plane, 1);
    return out;
}

SensitivityMaps estimate_sensitivities(const MultiCoilKSpace& s0,
                                       const SamplingMask& mask, int calib,
                                       double eps) {
    if (calib < 4) throw std::invalid_argument("estimate_sensitivities: calib must be >= 4");
    if (s0.height != mask.height || s0.width != mask.width)
        throw std::invalid_argument("estimate_sensitivities: mask shape mismatch");
    if (calib > s0.height)
        throw std::invalid_argument("estimate_sensitivities: calib exceeds line count");

    const int calib_start = s0.height / 2 - calib / 2;
    for (int i = 0; i < calib; ++i)
        if (!mask.is_sampled(calib_start + i))
            throw std::invalid_argument(
                "estimate_sensitivities: calibration lines missing from mask");

    // crop to the calibration lines with a raised-cosine apodization,
    // zero-padded back to full size
    CoilStack lowres_ksp(s0.n_coil, s0.height, s0.width);
    for (int i = 0; i < calib; ++i) {
        const int y = calib_start + i;
        const double window = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (i + 0.5) / calib));
        for (int c = 0; c < s0.n_coil; ++c)
            for (int x = 0; x < s0.width; ++x)
                lowres_ksp.at(c, y, x) = window * s0.at(c, y, x);
    }

    CoilStack lowres = ifft2c(lowres_ksp);

    const std::size_t plane = lowres.plane_size();
    std::vector<double> rss(plane, 0.0);
    double rss_max = 0.0;
    for (std::size_t p = 0; p < plane; ++p) {
        double acc = 0.0;
        for (int c = 0; c < lowres.n_coil; ++c) acc += std::norm(lowres.data[c * plane + p]);
        rss[p] = std::sqrt(acc);
        rss_max = std::max(rss_max, rss[p]);
    }

    const double threshold = eps * rss_max;
    SensitivityMaps out;
    out.maps = CoilStack(s0.n_coil, s0.height, s0.width);
    out.support.assign(plane, 0);
    for (std::size_t p = 0; p < plane; ++p) {
        if (rss[p] >= threshold && rss[p] > 0.0) {
            out.support[p] = 1;
            const double inv = 1.0 / rss[p];
            for (int c = 0; c < s0.n_coil; ++c)
                out.maps.data[c * plane + p] = lowres.data[c * plane + p] * inv;
        }
    }
    return out;
}

ComplexImage combine(const MultiCoilImage& coil_imgs, const SensitivityMaps& maps) {
    if (coil_imgs.n_coil != maps.n_coil() || coil_imgs.height != maps.height() ||
        coil_imgs.width != maps.width())
        throw std::invalid_argument("combine: shape mismatch");

    ComplexImage out(coil_imgs.height, coil_imgs.width);
    const std::size_t plane = coil_imgs.plane_size();
    for (std::size_t p = 0; p < plane; ++p) {
        cplx acc = 0.0;
        for (int c = 0; c < coil_imgs.n_coil; ++c)
            acc += std::conj(maps.maps.data[c * plane + p]) * coil_imgs.data[c * plane + p];
        out.data[p] = acc;
    }
    return out;
}

MultiCoilImage expand(const ComplexImage& img, const SensitivityMaps& maps) {
    if (img.height != maps.height() || img.width != maps.width())
        throw std::invalid_argument("expand: shape mismatch");

    MultiCoilImage out(maps.n_coil(), img.height, img.width);
    const std::size_t plane = out.plane_size();
    for (int c = 0; c < maps.n_coil(); ++c)
        for (std::size_t p = 0; p < plane; ++p)
            out.data[c * plane + p] = maps.maps.data[c * plane + p] * img.data[p];
    return out;
}

}  // namespace mrdc
