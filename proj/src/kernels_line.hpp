// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "fbs/kernels.hpp"

namespace fbs::kernels::detail {

inline double basis_at(const double* basis, std::size_t len, std::size_t k, std::size_t l,
                       BasisSide side) {
    return side == BasisSide::rows ? basis[k * len + l] : basis[l * len + k];
}

// One width-axis line: contiguous input and output of length `len`.
inline void transform_row(const double* in, double* out, std::size_t len, const double* basis,
                          BasisSide side) {
    for (std::size_t k = 0; k < len; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < len; ++l) acc += basis_at(basis, len, k, l, side) * in[l];
        out[k] = acc;
    }
}

// Output row `k` of a height-axis transform on one channel plane. Accumulates
// whole rows so the inner loop is contiguous; per-element summation order
// (l ascending) matches transform_row.
inline void transform_plane_row(const double* plane_in, double* out_row, std::size_t height,
                                std::size_t width, std::size_t k, const double* basis,
                                BasisSide side) {
    for (std::size_t j = 0; j < width; ++j) out_row[j] = 0.0;
    for (std::size_t l = 0; l < height; ++l) {
        const double b = basis_at(basis, height, k, l, side);
        const double* src = plane_in + l * width;
        for (std::size_t j = 0; j < width; ++j) out_row[j] += b * src[j];
    }
}

}  // namespace fbs::kernels::detail
