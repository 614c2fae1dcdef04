// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fbs/band_masks.hpp"
#include "fbs/dct.hpp"
#include "fbs/tensor.hpp"

namespace fbs {

/// 2D frequency band substitution:
///   IDCT2D( DCT2D(guide) * M + DCT2D(sample) * (1 - M) ).
/// An all-zero mask returns `sample` unchanged and an all-one mask returns
/// `guide` unchanged; neither takes the transform round trip.
LatentFeature fbs2d(const LatentFeature& guide, const LatentFeature& sample,
                    const FeatureMask& mask, Exec exec = Exec::parallel);

/// Adaptive substitution as two cascaded 1D passes. The width pass swaps the
/// masked width-spectrum columns of `guide` into `sample`; the height pass then
/// swaps the masked height-spectrum rows of the *original* `guide` into the
/// width-updated sample. Net effect in the 2D spectrum: coefficients whose row
/// passes the height mask or whose column passes the width mask come from
/// `guide`, the rest from `sample`.
LatentFeature adafbs(const LatentFeature& guide, const LatentFeature& sample,
                     const MaskPair& masks, Exec exec = Exec::parallel);

/// a * M + b * (1 - M) in the spatial domain, M broadcast over channels.
/// Implemented as a select, so kept elements are bit-exact copies.
LatentFeature blend_masked(const LatentFeature& a, const LatentFeature& b, const FeatureMask& mask,
                           Exec exec = Exec::parallel);

}  // namespace fbs
