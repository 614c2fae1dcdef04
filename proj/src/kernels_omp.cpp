// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <omp.h>

#include <cstdint>

#include "fbs/kernels.hpp"
#include "kernels_line.hpp"

namespace fbs::kernels::omp {

namespace {
// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::int64_t kMinParallelWork = 1 << 14;
}

void apply_along_axis(std::span<const double> in, std::span<double> out, const Shape& shape,
                      Axis axis, std::span<const double> basis, BasisSide side) {
    const auto h = static_cast<std::int64_t>(shape.height);
    const auto w = static_cast<std::int64_t>(shape.width);
    const auto channels = static_cast<std::int64_t>(shape.channels);
    const double* src = in.data();
    double* dst = out.data();
    const double* B = basis.data();

    if (axis == Axis::width) {
        const std::int64_t lines = channels * h;
        const bool par = lines * w * w >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t r = 0; r < lines; ++r) {
            detail::transform_row(src + r * w, dst + r * w, static_cast<std::size_t>(w), B, side);
        }
        return;
    }
    const std::int64_t rows = channels * h;
    const bool par = rows * h * w >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < rows; ++r) {
        const std::int64_t c = r / h;
        const std::int64_t k = r % h;
        detail::transform_plane_row(src + c * h * w, dst + r * w, static_cast<std::size_t>(h),
                                    static_cast<std::size_t>(w), static_cast<std::size_t>(k), B,
                                    side);
    }
}

void select(std::span<const double> a, std::span<const double> b,
            std::span<const std::uint8_t> mask, const Shape& shape, std::span<double> out) {
    const auto plane = static_cast<std::int64_t>(shape.plane());
    const auto total = static_cast<std::int64_t>(shape.numel());
    const double* pa = a.data();
    const double* pb = b.data();
    const std::uint8_t* pm = mask.data();
    double* po = out.data();
#pragma omp parallel for schedule(static) if (total >= kMinParallelWork)
    for (std::int64_t k = 0; k < total; ++k) {
        po[k] = pm[k % plane] ? pa[k] : pb[k];
    }
}

}  // namespace fbs::kernels::omp
