// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/kernels.hpp"
#include "kernels_line.hpp"

namespace fbs::kernels::serial {

void apply_along_axis(std::span<const double> in, std::span<double> out, const Shape& shape,
                      Axis axis, std::span<const double> basis, BasisSide side) {
    const std::size_t h = shape.height, w = shape.width;
    if (axis == Axis::width) {
        const std::size_t lines = shape.channels * h;
        for (std::size_t r = 0; r < lines; ++r) {
            detail::transform_row(in.data() + r * w, out.data() + r * w, w, basis.data(), side);
        }
        return;
    }
    for (std::size_t c = 0; c < shape.channels; ++c) {
        const double* plane = in.data() + c * h * w;
        for (std::size_t k = 0; k < h; ++k) {
            detail::transform_plane_row(plane, out.data() + (c * h + k) * w, h, w, k,
                                        basis.data(), side);
        }
    }
}

void select(std::span<const double> a, std::span<const double> b,
            std::span<const std::uint8_t> mask, const Shape& shape, std::span<double> out) {
    const std::size_t plane = shape.plane();
    for (std::size_t c = 0; c < shape.channels; ++c) {
        for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t k = c * plane + p;
            out[k] = mask[p] ? a[k] : b[k];
        }
    }
}

}  // namespace fbs::kernels::serial
