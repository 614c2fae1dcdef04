// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "fbs/kernels.hpp"
#include "fbs/tensor.hpp"

namespace fbs {

using kernels::Axis;

/// Which kernel family executes a transform. Results are bit-identical.
enum class Exec { serial, parallel };

/// Orthonormal DCT-II basis for length `len`, row-major `len x len`:
/// B[k][l] = sqrt(2/len) * c_k * cos(pi * k * (2l + 1) / (2 len)),
/// c_0 = 1/sqrt(2), c_k = 1 otherwise.
///
/// Bases are built on first use and cached for the process lifetime; lookups
/// are safe from any thread.
std::span<const double> dct_basis(std::size_t len);

// Per-channel transforms. The spectrum shares the feature's layout, with
// coefficient (0, 0) the lowest frequency. All of them are orthonormal, so
// Frobenius norms are preserved and each inverse is the transpose.

LatentFeature dct2d(const LatentFeature& z, Exec exec = Exec::parallel);
LatentFeature idct2d(const LatentFeature& spectrum, Exec exec = Exec::parallel);

LatentFeature dct1d_axis(const LatentFeature& z, Axis axis, Exec exec = Exec::parallel);
LatentFeature idct1d_axis(const LatentFeature& spectrum, Axis axis, Exec exec = Exec::parallel);

}  // namespace fbs
