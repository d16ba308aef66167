#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrdc/core.hpp"
#include "test_helpers.hpp"

using namespace mrdc;
using namespace mrdc::testing;

TEST_CASE("fft2c of a centered impulse is flat") {
    ComplexImage img(8, 8);
    img.at(4, 4) = 1.0;
    const ComplexImage ksp = fft2c(img);
    for (const auto& v : ksp.data) {
        CHECK(v.real() == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("fft2c of a constant image is a single DC sample") {
    const cplx c(0.7, -0.3);
    ComplexImage img(8, 8);
    for (auto& v : img.data) v = c;
    const ComplexImage ksp = fft2c(img);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const cplx expected = (y == 4 && x == 4) ? 8.0 * c : cplx(0.0);
            CHECK(std::abs(ksp.at(y, x) - expected) < 1e-12);
        }
}

TEST_CASE("fft2c is unitary") {
    const ComplexImage img = random_image(16, 16, 11);
    const double before = norm2(img);
    const double after = norm2(fft2c(img));
    CHECK(std::abs(after - before) <= 1e-12 * before);
}

TEST_CASE("ifft2c inverts fft2c") {
    const ComplexImage img = random_image(16, 16, 23);
    const ComplexImage back = ifft2c(fft2c(img));
    double peak = 0.0;
    for (const auto& v : img.data) peak = std::max(peak, std::abs(v));
    CHECK(max_abs_diff(img, back) <= 1e-12 * peak);
}

TEST_CASE("ifft2c of zeros is zeros") {
    const ComplexImage zeros(8, 8);
    const ComplexImage out = ifft2c(zeros);
    for (const auto& v : out.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("ifft2c of a flat spectrum is the centered impulse") {
    ComplexImage ksp(8, 8);
    for (auto& v : ksp.data) v = 0.125;
    const ComplexImage img = ifft2c(ksp);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const cplx expected = (y == 4 && x == 4) ? cplx(1.0) : cplx(0.0);
            CHECK(std::abs(img.at(y, x) - expected) < 1e-12);
        }
}

TEST_CASE("odd dimensions round trip with the floor-center convention") {
    const ComplexImage img = random_image(7, 9, 31);
    CHECK(max_abs_diff(img, ifft2c(fft2c(img))) < 1e-12);

    // centered impulse at (3, 4) still gives a flat spectrum
    ComplexImage impulse(7, 9);
    impulse.at(3, 4) = 1.0;
    const ComplexImage ksp = fft2c(impulse);
    const double expected = 1.0 / std::sqrt(63.0);
    for (const auto& v : ksp.data) CHECK(std::abs(v - cplx(expected)) < 1e-12);
}

TEST_CASE("fft2c is linear") {
    const ComplexImage x = random_image(12, 10, 41);
    const ComplexImage y = random_image(12, 10, 43);
    const cplx alpha(0.3, -1.1);
    const cplx beta(-0.8, 0.25);

    ComplexImage mix(12, 10);
    for (std::size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = alpha * x.data[i] + beta * y.data[i];

    const ComplexImage lhs = fft2c(mix);
    const ComplexImage fx = fft2c(x);
    const ComplexImage fy = fft2c(y);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.data.size(); ++i)
        worst = std::max(worst,
                         std::abs(lhs.data[i] - (alpha * fx.data[i] + beta * fy.data[i])));
    CHECK(worst < 1e-12);
}

TEST_CASE("fft2c rejects empty dimensions") {
    ComplexImage bad;
    CHECK_THROWS_AS(fft2c(bad), std::invalid_argument);
    CHECK_THROWS_AS(ifft2c(bad), std::invalid_argument);
}

TEST_CASE("inner_product basics") {
    const std::vector<cplx> one{cplx(1.0, 0.0)};
    CHECK(inner_product(std::span<const cplx>(one), std::span<const cplx>(one)) ==
          cplx(1.0, 0.0));

    const std::vector<cplx> i_vec{cplx(0.0, 1.0)};
    const cplx got =
        inner_product(std::span<const cplx>(i_vec), std::span<const cplx>(one));
    CHECK(got == cplx(0.0, -1.0));
}

TEST_CASE("inner_product matches the scalar loop oracle") {
    const ComplexImage a = random_image(4, 4, 7);
    const ComplexImage b = random_image(4, 4, 9);
    cplx expected = 0.0;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) expected += std::conj(a.at(y, x)) * b.at(y, x);
    CHECK(std::abs(inner_product(a, b) - expected) < 1e-14);
}

TEST_CASE("inner_product rejects shape mismatches") {
    const ComplexImage a = random_image(4, 4, 1);
    const ComplexImage b = random_image(4, 5, 2);
    CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
}

TEST_CASE("coil stack plane round trip") {
    const CoilStack stack = random_stack(3, 5, 6, 99);
    CoilStack copy(3, 5, 6);
    for (int c = 0; c < 3; ++c) copy.set_plane(c, stack.plane(c));
    CHECK(max_abs_diff(stack, copy) == 0.0);
}
