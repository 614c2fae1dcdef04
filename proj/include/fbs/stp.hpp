// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "fbs/tensor.hpp"

namespace fbs {

enum class ResizeKernel { bilinear, nearest };

std::string_view to_string(ResizeKernel k);
ResizeKernel parse_resize_kernel(std::string_view s);

/// One draw from the spatial transformation pool. Sampled once per run and
/// reused unchanged at every substitution step.
///
/// Crop coordinates live in the 3x mirror-expanded grid of the *rotated*
/// feature: for a quarter turn of a non-square h x w feature that grid is
/// 3w x 3h, and crop_h ranges over [w, 3w].
struct SpatialTransformParams {
    int quarter_turns = 0;  // counter-clockwise, 0..3
    bool hflip = false;
    bool vflip = false;
    std::size_t crop_top = 0;
    std::size_t crop_left = 0;
    std::size_t crop_h = 0;
    std::size_t crop_w = 0;

    int rotation_degrees() const { return 90 * quarter_turns; }

    /// Rotation 0, no flips, crop = the centre tile of the expansion.
    static SpatialTransformParams identity(std::size_t h, std::size_t w);

    friend bool operator==(const SpatialTransformParams&, const SpatialTransformParams&) = default;
};

SpatialTransformParams stp_sample(std::size_t h, std::size_t w, std::uint64_t seed);

/// Throws InvalidArgument unless `p` describes a valid window for an h x w feature.
void stp_validate(const SpatialTransformParams& p, std::size_t h, std::size_t w);

/// rotate -> hflip -> vflip -> mirror-expand to 3x -> crop -> resize back to h x w.
LatentFeature stp_apply(const LatentFeature& z, const SpatialTransformParams& p,
                        ResizeKernel kernel = ResizeKernel::bilinear);

/// Tiles z into a 3h x 3w grid of reflected copies: the centre tile is z and
/// each neighbour is mirrored across the shared edge, so edge rows/columns repeat.
LatentFeature mirror_expand(const LatentFeature& z);

LatentFeature rotate_quarter_turns(const LatentFeature& z, int quarter_turns);
LatentFeature flip_horizontal(const LatentFeature& z);
LatentFeature flip_vertical(const LatentFeature& z);

}  // namespace fbs
