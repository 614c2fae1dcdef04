// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <array>

#include "fbs/errors.hpp"
#include "fbs/stp.hpp"
#include "oracles.hpp"

using namespace fbs;

namespace {

std::pair<double, double> value_range(const LatentFeature& z) {
    const auto [lo, hi] = std::minmax_element(z.values().begin(), z.values().end());
    return {*lo, *hi};
}

}  // namespace

TEST_CASE("identity params reproduce the input exactly") {
    for (auto kernel : {ResizeKernel::bilinear, ResizeKernel::nearest}) {
        const auto z = oracle::random_feature({3, 6, 9}, 1);
        CHECK(stp_apply(z, SpatialTransformParams::identity(6, 9), kernel) == z);
    }
}

TEST_CASE("180 degree rotation reverses both axes") {
    const auto z = oracle::random_feature({2, 5, 7}, 2);
    auto p = SpatialTransformParams::identity(5, 7);
    p.quarter_turns = 2;
    const auto out = stp_apply(z, p);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 7; ++j) CHECK(out.at(c, i, j) == z.at(c, 4 - i, 6 - j));
}

TEST_CASE("quarter turn is counter-clockwise") {
    // [[1,2],[3,4]] turned 90 degrees CCW is [[2,4],[1,3]].
    const auto r = rotate_quarter_turns(LatentFeature({1, 2, 2}, {1, 2, 3, 4}), 1);
    CHECK(r == LatentFeature({1, 2, 2}, {2, 4, 1, 3}));
    const auto z = oracle::random_feature({1, 3, 5}, 3);
    const auto q1 = rotate_quarter_turns(z, 1);
    CHECK(q1.shape() == Shape{1, 5, 3});
    CHECK(rotate_quarter_turns(q1, 3) == z);
    CHECK(rotate_quarter_turns(rotate_quarter_turns(z, 2), 2) == z);
}

TEST_CASE("flips") {
    const LatentFeature z({1, 2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(flip_horizontal(z) == LatentFeature({1, 2, 3}, {3, 2, 1, 6, 5, 4}));
    CHECK(flip_vertical(z) == LatentFeature({1, 2, 3}, {4, 5, 6, 1, 2, 3}));
}

TEST_CASE("mirror expansion of [[1,2],[3,4]]") {
    const auto e = mirror_expand(LatentFeature({1, 2, 2}, {1, 2, 3, 4}));
    REQUIRE(e.shape() == Shape{1, 6, 6});
    // Reflection index for x in [0, 3n): n-1-x, x-n, 3n-1-x per tile.
    const auto reflect = [](std::size_t x) -> std::size_t { return x < 2 ? 1 - x : (x < 4 ? x - 2 : 5 - x); };
    const double src[2][2] = {{1, 2}, {3, 4}};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(e.at(0, i, j) == src[reflect(i)][reflect(j)]);
    CHECK(e.at(0, 2, 2) == 1);
    CHECK(e.at(0, 3, 3) == 4);
    // Adjacent tiles share edge values.
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(e.at(0, 1, j) == e.at(0, 2, j));
        CHECK(e.at(0, 3, j) == e.at(0, 4, j));
    }
}

TEST_CASE("stp_sample is deterministic and always valid") {
    CHECK(stp_sample(8, 12, 99) == stp_sample(8, 12, 99));
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const std::size_t h = 2 + seed % 9, w = 2 + (seed / 9) % 11;
        const auto p = stp_sample(h, w, seed);
        CHECK_NOTHROW(stp_validate(p, h, w));
        const std::size_t rh = p.quarter_turns % 2 ? w : h, rw = p.quarter_turns % 2 ? h : w;
        CHECK(p.crop_top + p.crop_h <= 3 * rh);
        CHECK(p.crop_left + p.crop_w <= 3 * rw);
    }
}

TEST_CASE("stp_sample rotation and flip frequencies") {
    // 10^4 draws; the binomial 99.9% interval around 0.25 is well inside
    // [0.23, 0.27] (3.29 sigma = 0.0142).
    std::array<int, 4> rot{};
    int hf = 0, vf = 0;
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const auto p = stp_sample(16, 16, 5000000 + s);
        ++rot[p.quarter_turns];
        hf += p.hflip;
        vf += p.vflip;
    }
    for (int r : rot) {
        CHECK(r / double(n) >= 0.23);
        CHECK(r / double(n) <= 0.27);
    }
    CHECK(std::abs(hf / double(n) - 0.5) < 0.0165);
    CHECK(std::abs(vf / double(n) - 0.5) < 0.0165);
}

TEST_CASE("stp_sample crop sizes cover [h, 3h]") {
    std::size_t min_h = 1000, max_h = 0;
    for (std::uint64_t s = 0; s < 3000; ++s) {
        const auto p = stp_sample(4, 4, s);
        min_h = std::min(min_h, p.crop_h);
        max_h = std::max(max_h, p.crop_h);
    }
    CHECK(min_h == 4);
    CHECK(max_h == 12);
}

TEST_CASE("stp_apply preserves shape and value range") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Shape s{2, 3 + seed % 7, 2 + seed % 11};
        const auto z = oracle::random_feature(s, seed);
        const auto p = stp_sample(s.height, s.width, seed * 31 + 7);
        const auto [lo, hi] = value_range(z);
        for (auto kernel : {ResizeKernel::bilinear, ResizeKernel::nearest}) {
            const auto out = stp_apply(z, p, kernel);
            REQUIRE(out.shape() == s);
            const auto [olo, ohi] = value_range(out);
            CHECK(olo >= lo);
            CHECK(ohi <= hi);
        }
    }
}

TEST_CASE("invalid windows are rejected") {
    auto p = SpatialTransformParams::identity(4, 6);
    p.crop_top = 9;
    CHECK_THROWS_AS(stp_validate(p, 4, 6), InvalidArgument);
    p = SpatialTransformParams::identity(4, 6);
    p.crop_h = 3;
    CHECK_THROWS_AS(stp_validate(p, 4, 6), InvalidArgument);
    p = SpatialTransformParams::identity(4, 6);
    p.quarter_turns = 4;
    CHECK_THROWS_AS(stp_validate(p, 4, 6), InvalidArgument);
    // A quarter turn swaps the expanded grid to 18 x 12.
    p = SpatialTransformParams{1, false, false, 0, 0, 18, 12};
    CHECK_NOTHROW(stp_validate(p, 4, 6));
    CHECK_NOTHROW(stp_apply(oracle::random_feature({1, 4, 6}, 1), p));
}

TEST_CASE("resize kernel names") {
    CHECK(parse_resize_kernel("nearest") == ResizeKernel::nearest);
    CHECK(to_string(ResizeKernel::bilinear) == "bilinear");
    CHECK_THROWS_AS(parse_resize_kernel("cubic"), ConfigError);
}
