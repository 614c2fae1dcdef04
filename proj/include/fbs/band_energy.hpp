// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "fbs/band_masks.hpp"
#include "fbs/tensor.hpp"

namespace fbs {

enum class Band { low, mid, high };

/// Splits a DCT spectrum into three disjoint bands by two cuts.
///
/// coordinate_sum: r = i + j.
/// percentile:     r = 100 * max(i / h, j / w), evaluated exactly as
///                 integer-vs-product comparisons.
/// low: r <= lower, mid: lower < r <= upper, high: r > upper.
struct BandPartition {
    ThresholdUnits units = ThresholdUnits::percentile;
    double lower = 7.0;
    double upper = 50.0;

    Band classify(std::size_t i, std::size_t j, std::size_t h, std::size_t w) const;
    void validate() const;

    friend bool operator==(const BandPartition&, const BandPartition&) = default;
};

FeatureMask band_region(const BandPartition& p, Band band, std::size_t h, std::size_t w);

struct BandEnergies {
    double low = 0.0;
    double mid = 0.0;
    double high = 0.0;

    double total() const noexcept { return low + mid + high; }
    /// Each band over the total; all zero for an all-zero spectrum.
    BandEnergies fractions() const noexcept;
};

/// Squared DCT coefficients of `spectrum`, summed per band over all channels.
BandEnergies band_energies_of_spectrum(const LatentFeature& spectrum, const BandPartition& p);
/// Same, transforming `z` first.
BandEnergies band_energies(const LatentFeature& z, const BandPartition& p);

/// Squared DCT coefficients of `z` inside `region` (broadcast over channels).
double region_energy(const LatentFeature& z, const FeatureMask& region);

/// Pearson correlation between the DCT coefficients of `a` and `b` restricted
/// to `region`, pooled over channels. Zero when either side is constant.
double spectral_correlation(const LatentFeature& a, const LatentFeature& b,
                            const FeatureMask& region);

}  // namespace fbs
