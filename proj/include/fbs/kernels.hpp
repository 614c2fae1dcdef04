// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "fbs/tensor.hpp"

// Inner loops of the transform and substitution operators.
//
// Two implementations share one signature: `serial` is the reference kept for
// testing and `omp` distributes independent lines across OpenMP threads. Both
// accumulate every output element in the same order, so their results are
// bit-identical; test_kernels holds them to that.
namespace fbs::kernels {

enum class Axis { width, height };

enum class BasisSide {
    rows,     // out[k] = sum_l basis[k][l] * in[l]   (analysis)
    columns,  // out[l] = sum_k basis[k][l] * in[k]   (synthesis)
};

namespace serial {

/// Multiplies every line of `in` along `axis` by the L x L row-major `basis`,
/// where L is the extent of that axis.
void apply_along_axis(std::span<const double> in, std::span<double> out, const Shape& shape,
                      Axis axis, std::span<const double> basis, BasisSide side);

/// out = mask ? a : b, with the h x w mask broadcast over channels.
void select(std::span<const double> a, std::span<const double> b,
            std::span<const std::uint8_t> mask, const Shape& shape, std::span<double> out);

}  // namespace serial

namespace omp {

void apply_along_axis(std::span<const double> in, std::span<double> out, const Shape& shape,
                      Axis axis, std::span<const double> basis, BasisSide side);

void select(std::span<const double> a, std::span<const double> b,
            std::span<const std::uint8_t> mask, const Shape& shape, std::span<double> out);

}  // namespace omp

}  // namespace fbs::kernels
