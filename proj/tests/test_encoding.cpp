#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrdc/encoding.hpp"
#include "test_helpers.hpp"

using namespace mrdc;
using namespace mrdc::testing;

namespace {

SensitivityMaps unit_single_coil(int h, int w) {
    SensitivityMaps maps;
    maps.maps = CoilStack(1, h, w);
    for (auto& v : maps.maps.data) v = 1.0;
    maps.support.assign(maps.maps.plane_size(), 1);
    return maps;
}

}  // namespace

TEST_CASE("with a full mask and a unit coil, forward_op reduces to fft2c") {
    const SensitivityMaps maps = unit_single_coil(8, 8);
    const SamplingMask full = SamplingMask::full(8, 8);
    const ComplexImage x = random_image(8, 8, 3);
    const MultiCoilKSpace got = forward_op(x, maps, full);
    const ComplexImage expected = fft2c(x);
    CHECK(max_abs_diff(got.plane(0), expected) == 0.0);
}

TEST_CASE("with a full mask and a unit coil, adjoint_op reduces to ifft2c") {
    const SensitivityMaps maps = unit_single_coil(8, 8);
    const SamplingMask full = SamplingMask::full(8, 8);
    const CoilStack s = random_stack(1, 8, 8, 4);
    const ComplexImage got = adjoint_op(s, maps, full);
    CHECK(max_abs_diff(got, ifft2c(s.plane(0))) == 0.0);
}

TEST_CASE("zero image maps to zero k-space and back") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 2, 5);
    const SamplingMask mask = generate_mask(8, 8, 2.0, 4, 6);
    const MultiCoilKSpace ksp = forward_op(ComplexImage(8, 8), maps, mask);
    for (const auto& v : ksp.data) CHECK(std::abs(v) == 0.0);
    const ComplexImage img = adjoint_op(CoilStack(2, 8, 8), maps, mask);
    for (const auto& v : img.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("fully sampled noiseless adjoint reproduces the image on support") {
    const SensitivityMaps maps = simulate_sensitivities(16, 16, 4, 7);
    const SamplingMask full = SamplingMask::full(16, 16);
    const ComplexImage x = random_image(16, 16, 8);
    const MultiCoilKSpace s0 = forward_op(x, maps, full);
    const ComplexImage back = adjoint_op(s0, maps, full);
    CHECK(max_abs_diff(back, x) <= 1e-6);
}

TEST_CASE("E and E^H satisfy the adjoint identity over 50 random instances") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 4, 9);
    const SamplingMask mask = generate_mask(8, 8, 2.0, 4, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexImage x = random_image(8, 8, 1000 + trial);
        const CoilStack y = random_stack(4, 8, 8, 2000 + trial);
        const cplx lhs = inner_product(forward_op(x, maps, mask), y);
        const cplx rhs = inner_product(x, adjoint_op(y, maps, mask));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
    }
}

TEST_CASE("the encoding operator is a contraction") {
    const SensitivityMaps maps = simulate_sensitivities(16, 16, 3, 11);
    const SamplingMask mask = generate_mask(16, 16, 2.0, 8, 12);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexImage x = random_image(16, 16, 3000 + trial);
        CHECK(norm2(forward_op(x, maps, mask)) <= norm2(x) * (1.0 + 1e-12));
    }
}

TEST_CASE("shape mismatches are rejected") {
    const SensitivityMaps maps = simulate_sensitivities(8, 8, 2, 13);
    const SamplingMask mask = SamplingMask::full(16, 16);
    CHECK_THROWS_AS(forward_op(ComplexImage(8, 8), maps, mask), std::invalid_argument);
}
