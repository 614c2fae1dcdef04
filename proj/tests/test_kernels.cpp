// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

// The OpenMP kernels must reproduce the serial reference bit for bit.

#include <doctest.h>

#include <omp.h>

#include <cstring>

#include "fbs/band_masks.hpp"
#include "fbs/dct.hpp"
#include "fbs/kernels.hpp"
#include "fbs/substitution.hpp"
#include "oracles.hpp"

using namespace fbs;

namespace {

bool bit_equal(const LatentFeature& a, const LatentFeature& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

// Large enough to cross the parallel-work threshold, plus small odd shapes.
const Shape kShapes[] = {{1, 2, 2}, {3, 7, 13}, {4, 64, 64}, {2, 96, 40}, {4, 33, 65}};

struct ThreadGuard {
    int saved = omp_get_max_threads();
    explicit ThreadGuard(int n) { omp_set_num_threads(n); }
    ~ThreadGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("apply_along_axis: serial and omp agree bitwise") {
    ThreadGuard threads(4);
    for (const auto& s : kShapes) {
        const auto z = oracle::random_feature(s, s.numel());
        for (auto axis : {kernels::Axis::width, kernels::Axis::height}) {
            const std::size_t L = axis == kernels::Axis::width ? s.width : s.height;
            const auto basis = dct_basis(L);
            for (auto side : {kernels::BasisSide::rows, kernels::BasisSide::columns}) {
                std::vector<double> a(z.size()), b(z.size());
                kernels::serial::apply_along_axis(z.values(), a, s, axis, basis, side);
                kernels::omp::apply_along_axis(z.values(), b, s, axis, basis, side);
                CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
            }
        }
    }
}

TEST_CASE("select: serial and omp agree bitwise") {
    ThreadGuard threads(4);
    for (const auto& s : kShapes) {
        const auto a = oracle::random_feature(s, 1);
        const auto b = oracle::random_feature(s, 2);
        std::vector<std::uint8_t> bits(s.plane());
        for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = (k * 2654435761u) % 3 == 0;
        std::vector<double> x(s.numel()), y(s.numel());
        kernels::serial::select(a.values(), b.values(), bits, s, x);
        kernels::omp::select(a.values(), b.values(), bits, s, y);
        CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == (bits[k % s.plane()] ? a[k] : b[k]));
    }
}

TEST_CASE("public operators: Exec::serial and Exec::parallel agree bitwise") {
    ThreadGuard threads(4);
    for (const auto& s : kShapes) {
        const auto g = oracle::random_feature(s, 3);
        const auto x = oracle::random_feature(s, 4);
        CHECK(bit_equal(dct2d(g, Exec::serial), dct2d(g, Exec::parallel)));
        CHECK(bit_equal(idct2d(g, Exec::serial), idct2d(g, Exec::parallel)));
        for (auto axis : {Axis::width, Axis::height}) {
            CHECK(bit_equal(dct1d_axis(g, axis, Exec::serial), dct1d_axis(g, axis, Exec::parallel)));
            CHECK(bit_equal(idct1d_axis(g, axis, Exec::serial), idct1d_axis(g, axis, Exec::parallel)));
        }
        BandSpec coord = BandSpec::coordinate_defaults(BandMode::low);
        coord.low_pass = static_cast<double>(s.height + s.width) / 3.0;
        const auto m2 = make_mask_2d(coord, s.height, s.width);
        CHECK(bit_equal(fbs2d(g, x, m2, Exec::serial), fbs2d(g, x, m2, Exec::parallel)));
        for (auto mode : {BandMode::low, BandMode::mid, BandMode::high}) {
            const auto pair = make_mask_pair_1d(BandSpec::percentile_defaults(mode), s.height, s.width);
            CHECK(bit_equal(adafbs(g, x, pair, Exec::serial), adafbs(g, x, pair, Exec::parallel)));
        }
        CHECK(bit_equal(blend_masked(g, x, m2, Exec::serial), blend_masked(g, x, m2, Exec::parallel)));
    }
}

TEST_CASE("results do not depend on the thread count") {
    const auto z = oracle::random_feature({4, 64, 64}, 8);
    LatentFeature ref = [&] {
        ThreadGuard one(1);
        return dct2d(z);
    }();
    for (int n : {2, 3, 8}) {
        ThreadGuard t(n);
        CHECK(bit_equal(dct2d(z), ref));
    }
}
