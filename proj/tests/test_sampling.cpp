#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "mrdc/sampling.hpp"
#include "test_helpers.hpp"

using namespace mrdc;
using namespace mrdc::testing;

TEST_CASE("paper-shaped mask: 256 lines, AF 4, 24 calibration lines") {
    const SamplingMask mask = generate_mask(256, 256, 4.0, 24, 17);
    CHECK(mask.sampled_lines.size() == 64);
    for (int line = 116; line <= 139; ++line) CHECK(mask.is_sampled(line));
    // sorted and unique
    for (std::size_t i = 1; i < mask.sampled_lines.size(); ++i)
        CHECK(mask.sampled_lines[i] > mask.sampled_lines[i - 1]);
}

TEST_CASE("af 1 with no calibration samples everything") {
    const SamplingMask mask = generate_mask(16, 8, 1.0, 0, 3);
    CHECK(mask.sampled_lines.size() == 16);
    for (int line = 0; line < 16; ++line) CHECK(mask.is_sampled(line));
}

TEST_CASE("mask generation is deterministic in the seed") {
    const SamplingMask a = generate_mask(128, 64, 4.0, 16, 1234);
    const SamplingMask b = generate_mask(128, 64, 4.0, 16, 1234);
    CHECK(a.sampled_lines == b.sampled_lines);
    const SamplingMask c = generate_mask(128, 64, 4.0, 16, 1235);
    CHECK(a.sampled_lines != c.sampled_lines);
}

TEST_CASE("sampled fraction stays within 1/AF +- 1/height") {
    for (const double af : {2.0, 3.0, 4.0, 6.0}) {
        for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            const int height = 160;
            const SamplingMask mask = generate_mask(height, 32, af, 16, seed);
            const double fraction =
                static_cast<double>(mask.sampled_lines.size()) / height;
            CHECK(fraction >= 1.0 / af - 1.0 / height);
            CHECK(fraction <= 1.0 / af + 1.0 / height);
        }
    }
}

TEST_CASE("too-small line budget is an invalid configuration") {
    CHECK_THROWS_AS(generate_mask(64, 64, 4.0, 24, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_mask(64, 64, 0.5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_mask(64, 64, 4.0, -1, 1), std::invalid_argument);
}

TEST_CASE("apply_mask with a full mask copies bitwise") {
    const CoilStack ksp = random_stack(2, 8, 8, 5);
    const SamplingMask full = SamplingMask::full(8, 8);
    const CoilStack out = apply_mask(ksp, full);
    CHECK(max_abs_diff(out, ksp) == 0.0);
}

TEST_CASE("apply_mask with an empty mask zeroes everything") {
    const CoilStack ksp = random_stack(2, 8, 8, 6);
    SamplingMask empty;
    empty.height = 8;
    empty.width = 8;
    const CoilStack out = apply_mask(ksp, empty);
    for (const auto& v : out.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("apply_mask keeps exactly the sampled line") {
    const CoilStack ksp = random_stack(1, 8, 8, 7);
    SamplingMask single;
    single.height = 8;
    single.width = 8;
    single.sampled_lines = {3};
    const CoilStack out = apply_mask(ksp, single);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            if (y == 3)
                CHECK(out.at(0, y, x) == ksp.at(0, y, x));
            else
                CHECK(std::abs(out.at(0, y, x)) == 0.0);
        }
}

TEST_CASE("apply_mask is idempotent") {
    const CoilStack ksp = random_stack(3, 32, 16, 8);
    const SamplingMask mask = generate_mask(32, 16, 2.0, 8, 21);
    const CoilStack once = apply_mask(ksp, mask);
    const CoilStack twice = apply_mask(once, mask);
    CHECK(max_abs_diff(once, twice) == 0.0);
}

TEST_CASE("apply_mask rejects mismatched shapes") {
    const CoilStack ksp = random_stack(1, 8, 8, 9);
    const SamplingMask mask = SamplingMask::full(16, 8);
    CHECK_THROWS_AS(apply_mask(ksp, mask), std::invalid_argument);
}
