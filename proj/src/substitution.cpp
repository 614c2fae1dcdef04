// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/substitution.hpp"

#include <vector>

#include "fbs/kernels.hpp"

namespace fbs {
namespace {

LatentFeature select(const LatentFeature& a, const LatentFeature& b, const FeatureMask& mask,
                     Exec exec) {
    std::vector<double> out(a.size());
    if (exec == Exec::serial) {
        kernels::serial::select(a.values(), b.values(), mask.bits(), a.shape(), out);
    } else {
        kernels::omp::select(a.values(), b.values(), mask.bits(), a.shape(), out);
    }
    return LatentFeature(a.shape(), std::move(out));
}

// One 1D substitution pass along `axis`, with the guide spectrum precomputed.
LatentFeature substitute_axis(const LatentFeature& guide, const LatentFeature& guide_spectrum,
                              const LatentFeature& sample, const FeatureMask& mask, Axis axis,
                              Exec exec) {
    if (mask.none_set()) return sample;
    if (mask.all_set()) return guide;
    const auto sample_spectrum = dct1d_axis(sample, axis, exec);
    return idct1d_axis(select(guide_spectrum, sample_spectrum, mask, exec), axis, exec);
}

}  // namespace

LatentFeature fbs2d(const LatentFeature& guide, const LatentFeature& sample,
                    const FeatureMask& mask, Exec exec) {
    require_same_shape(guide, sample, "fbs2d");
    require_mask_fits(guide, mask, "fbs2d");
    if (mask.none_set()) return sample;
    if (mask.all_set()) return guide;
    const auto merged = select(dct2d(guide, exec), dct2d(sample, exec), mask, exec);
    return idct2d(merged, exec);
}

LatentFeature adafbs(const LatentFeature& guide, const LatentFeature& sample,
                     const MaskPair& masks, Exec exec) {
    require_same_shape(guide, sample, "adafbs");
    require_mask_fits(guide, masks.width_mask, "adafbs");
    require_mask_fits(guide, masks.height_mask, "adafbs");

    const auto& wm = masks.width_mask;
    const auto& hm = masks.height_mask;
    const auto guide_w = (wm.none_set() || wm.all_set()) ? guide : dct1d_axis(guide, Axis::width, exec);
    auto updated = substitute_axis(guide, guide_w, sample, wm, Axis::width, exec);

    const auto guide_h = (hm.none_set() || hm.all_set()) ? guide : dct1d_axis(guide, Axis::height, exec);
    return substitute_axis(guide, guide_h, updated, hm, Axis::height, exec);
}

LatentFeature blend_masked(const LatentFeature& a, const LatentFeature& b, const FeatureMask& mask,
                           Exec exec) {
    require_same_shape(a, b, "blend_masked");
    require_mask_fits(a, mask, "blend_masked");
    return select(a, b, mask, exec);
}

}  // namespace fbs
