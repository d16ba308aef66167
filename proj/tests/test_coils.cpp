#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrdc/coils.hpp"
#include "mrdc/data.hpp"
#include "test_helpers.hpp"

using namespace mrdc;
using namespace mrdc::testing;

TEST_CASE("single simulated coil has unit magnitude everywhere") {
    const SensitivityMaps maps = simulate_sensitivities(16, 16, 1, 5);
    for (const auto& v : maps.maps.data)
        CHECK(std::abs(std::abs(v) - 1.0) <= 1e-12);
}

TEST_CASE("simulated maps are RSS-normalized") {
    const SensitivityMaps maps = simulate_sensitivities(24, 20, 6, 77);
    const std::size_t plane = maps.maps.plane_size();
    for (std::size_t p = 0; p < plane; ++p) {
        double rss = 0.0;
        for (int c = 0; c < maps.n_coil(); ++c)
            rss += std::norm(maps.maps.data[c * plane + p]);
        CHECK(std::abs(rss - 1.0) <= 1e-6);
        CHECK(maps.support[p] == 1);
    }
}

TEST_CASE("simulated maps are deterministic in the seed") {
    const SensitivityMaps a = simulate_sensitivities(16, 16, 4, 123);
    const SensitivityMaps b = simulate_sensitivities(16, 16, 4, 123);
    CHECK(max_abs_diff(a.maps, b.maps) == 0.0);
}

TEST_CASE("combine and expand match the pixel-loop oracle") {
    const SensitivityMaps maps = simulate_sensitivities(4, 4, 2, 9);
    const CoilStack coil_imgs = random_stack(2, 4, 4, 10);
    const ComplexImage img = random_image(4, 4, 11);

    const ComplexImage combined = combine(coil_imgs, maps);
    const MultiCoilImage expanded = expand(img, maps);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            cplx acc = 0.0;
            for (int c = 0; c < 2; ++c) {
                acc += std::conj(maps.maps.at(c, y, x)) * coil_imgs.at(c, y, x);
                CHECK(std::abs(expanded.at(c, y, x) - maps.maps.at(c, y, x) * img.at(y, x)) <
                      1e-14);
            }
            CHECK(std::abs(combined.at(y, x) - acc) < 1e-14);
        }
}

TEST_CASE("combine of zero stack is zero") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 3, 1);
    const ComplexImage out = combine(CoilStack(3, 8, 8), maps);
    for (const auto& v : out.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("combine undoes expand on support") {
    const SensitivityMaps maps = simulate_sensitivities(12, 12, 4, 2);
    const ComplexImage img = random_image(12, 12, 3);
    const ComplexImage back = combine(expand(img, maps), maps);
    CHECK(max_abs_diff(img, back) <= 1e-6);
}

TEST_CASE("coil images proportional to the maps recombine to the prefactor") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 4, 4);
    const ComplexImage y = random_image(8, 8, 5);
    const MultiCoilImage stack = expand(y, maps);  // x_i = C_i * y
    const ComplexImage got = combine(stack, maps);
    CHECK(max_abs_diff(got, y) <= 1e-6);
}

TEST_CASE("expand and combine are mutually adjoint") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 3, 6);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ComplexImage x = random_image(8, 8, 100 + seed);
        const CoilStack y = random_stack(3, 8, 8, 200 + seed);
        const cplx lhs = inner_product(expand(x, maps), y);
        const cplx rhs = inner_product(x, combine(y, maps));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("shape mismatches are rejected") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 2, 7);
    CHECK_THROWS_AS(combine(CoilStack(3, 8, 8), maps), std::invalid_argument);
    CHECK_THROWS_AS(expand(ComplexImage(4, 8), maps), std::invalid_argument);
}

TEST_CASE("estimate on a single unit-magnitude coil recovers unit magnitude") {
    // |C_1| = 1 everywhere, so the low-resolution estimate must normalize
    // back to unit magnitude on its support
    const SensitivityMaps truth = simulate_sensitivities(32, 32, 1, 8);
    const ComplexImage phantom = make_phantom(32, 32, 9, 6);
    const MultiCoilKSpace full = fft2c(expand(phantom, truth));
    const SamplingMask mask = SamplingMask::full(32, 32);
    const SensitivityMaps est = estimate_sensitivities(full, mask, 16);
    const std::size_t plane = est.maps.plane_size();
    for (std::size_t p = 0; p < plane; ++p)
        if (est.support[p]) CHECK(std::abs(std::abs(est.maps.data[p]) - 1.0) <= 1e-6);
}

TEST_CASE("estimates are RSS-normalized on support and zero off it") {
    const SensitivityMaps truth = simulate_sensitivities(32, 32, 4, 10);
    const ComplexImage phantom = make_phantom(32, 32, 11, 6);
    const MultiCoilKSpace full = fft2c(expand(phantom, truth));
    const SamplingMask mask = generate_mask(32, 32, 2.0, 16, 12);
    const SensitivityMaps est = estimate_sensitivities(full, mask, 16);
    const std::size_t plane = est.maps.plane_size();
    for (std::size_t p = 0; p < plane; ++p) {
        double rss = 0.0;
        for (int c = 0; c < 4; ++c) rss += std::norm(est.maps.data[c * plane + p]);
        if (est.support[p])
            CHECK(std::abs(rss - 1.0) <= 1e-6);
        else
            CHECK(rss == 0.0);
    }
}

TEST_CASE("undersampled estimate equals the fully sampled estimate") {
    // only the calibration lines feed the estimator, so masking the other
    // lines must not change the result
    const SensitivityMaps truth = simulate_sensitivities(64, 64, 4, 13);
    const ComplexImage phantom = make_phantom(64, 64, 14, 8);
    const MultiCoilKSpace full = fft2c(expand(phantom, truth));
    const SamplingMask mask = generate_mask(64, 64, 2.0, 24, 15);
    const MultiCoilKSpace undersampled = apply_mask(full, mask);

    const SensitivityMaps from_full =
        estimate_sensitivities(full, SamplingMask::full(64, 64), 24);
    const SensitivityMaps from_masked = estimate_sensitivities(undersampled, mask, 24);
    CHECK(max_abs_diff(from_full.maps, from_masked.maps) == 0.0);
}

TEST_CASE("estimated maps track simulated maps up to a shared pixel phase") {
    const SensitivityMaps truth = simulate_sensitivities(64, 64, 4, 16);
    const ComplexImage phantom = make_phantom(64, 64, 17, 8);
    const MultiCoilKSpace full = fft2c(expand(phantom, truth));
    const SamplingMask mask = generate_mask(64, 64, 2.0, 24, 18);
    const MultiCoilKSpace s0 = apply_mask(full, mask);
    const SensitivityMaps est = estimate_sensitivities(s0, mask, 24);

    // z(p) = sum_i conj(est_i) * truth_i has unit modulus when the estimate
    // is exact up to a per-pixel phase; apply it and measure the residual
    const std::size_t plane = est.maps.plane_size();
    double err_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < plane; ++p) {
        if (!est.support[p]) continue;
        cplx z = 0.0;
        for (int c = 0; c < 4; ++c)
            z += std::conj(est.maps.data[c * plane + p]) * truth.maps.data[c * plane + p];
        if (std::abs(z) == 0.0) continue;
        z /= std::abs(z);
        for (int c = 0; c < 4; ++c)
            err_sum += std::abs(est.maps.data[c * plane + p] * z -
                                truth.maps.data[c * plane + p]);
        ++count;
    }
    const double mean_err = err_sum / static_cast<double>(count * 4);
    // measured 0.0202 for this configuration; frozen with headroom
    CHECK(mean_err <= 0.05);
}

TEST_CASE("estimate validates its inputs") {
    const CoilStack ksp = random_stack(2, 32, 32, 19);
    const SamplingMask mask = generate_mask(32, 32, 2.0, 8, 20);
    CHECK_THROWS_AS(estimate_sensitivities(ksp, mask, 3), std::invalid_argument);
    CHECK_THROWS_AS(estimate_sensitivities(ksp, mask, 16), std::invalid_argument);

    SamplingMask no_center;
    no_center.height = 32;
    no_center.width = 32;
    no_center.sampled_lines = {0, 1, 2, 3};
    CHECK_THROWS_AS(estimate_sensitivities(ksp, no_center, 4), std::invalid_argument);
}
