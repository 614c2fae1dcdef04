// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "fbs/tensor.hpp"

namespace fbs {

enum class BandMode { low, mid, high };

/// How BandSpec thresholds are measured. `coordinate_sum` compares i + j
/// against absolute thresholds (2D masks); `percentile` compares each axis
/// index against pt * L / 100 (1D mask pairs).
enum class ThresholdUnits { coordinate_sum, percentile };

std::string_view to_string(BandMode m);
std::string_view to_string(ThresholdUnits u);
BandMode parse_band_mode(std::string_view s);
ThresholdUnits parse_threshold_units(std::string_view s);

struct BandSpec {
    BandMode mode = BandMode::low;
    ThresholdUnits units = ThresholdUnits::percentile;
    double low_pass = 60.0;
    double high_pass = 5.0;
    double mid_lower = 7.0;
    double mid_upper = 50.0;

    /// th_lp = 80, th_hp = 5, (th_mp1, th_mp2) = (5, 80).
    static BandSpec coordinate_defaults(BandMode mode);
    /// pt_lp = 60, pt_hp = 5, (pt_mp1, pt_mp2) = (7, 50).
    static BandSpec percentile_defaults(BandMode mode);

    /// Throws InvalidArgument on an inverted mid band or a percentile outside [0, 100].
    void validate() const;

    friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

/// Diagonal-band mask over zero-based DCT coordinates:
///   low:  i + j <= th_lp
///   high: i + j >  th_hp
///   mid:  th_mp1 < i + j <= th_mp2
FeatureMask make_mask_2d(const BandSpec& spec, std::size_t h, std::size_t w);

struct MaskPair {
    FeatureMask width_mask;   // depends on column j only
    FeatureMask height_mask;  // depends on row i only
};

/// Per-axis percentile masks. Cutoffs are compared exactly, without rounding:
/// column j passes the low mask iff 100 * j <= pt_lp * w.
MaskPair make_mask_pair_1d(const BandSpec& spec, std::size_t h, std::size_t w);

}  // namespace fbs
