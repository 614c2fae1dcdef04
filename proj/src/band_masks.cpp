// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/band_masks.hpp"

#include <vector>

#include "fbs/errors.hpp"

namespace fbs {
namespace {

bool passes(BandMode mode, double coord, double low, double high, double mid_lo, double mid_hi) {
    switch (mode) {
        case BandMode::low: return coord <= low;
        case BandMode::high: return coord > high;
        case BandMode::mid: return mid_lo < coord && coord <= mid_hi;
    }
    return false;
}

// Scales percentile thresholds by the axis length and compares against 100 * index,
// which keeps integral boundaries like pt = 60, L = 5 exact.
std::vector<std::uint8_t> axis_profile(const BandSpec& s, std::size_t len) {
    const double n = static_cast<double>(len);
    std::vector<std::uint8_t> profile(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double coord = 100.0 * static_cast<double>(k);
        profile[k] = passes(s.mode, coord, s.low_pass * n, s.high_pass * n, s.mid_lower * n,
                            s.mid_upper * n);
    }
    return profile;
}

}  // namespace

std::string_view to_string(BandMode m) {
    switch (m) {
        case BandMode::low: return "low";
        case BandMode::mid: return "mid";
        case BandMode::high: return "high";
    }
    return "?";
}

std::string_view to_string(ThresholdUnits u) {
    return u == ThresholdUnits::coordinate_sum ? "coordinate_sum" : "percentile";
}

BandMode parse_band_mode(std::string_view s) {
    if (s == "low") return BandMode::low;
    if (s == "mid") return BandMode::mid;
    if (s == "high") return BandMode::high;
    throw ConfigError("unknown band mode '" + std::string(s) + "' (expected low|mid|high)");
}

ThresholdUnits parse_threshold_units(std::string_view s) {
    if (s == "coordinate_sum") return ThresholdUnits::coordinate_sum;
    if (s == "percentile") return ThresholdUnits::percentile;
    throw ConfigError("unknown threshold units '" + std::string(s) + "'");
}

BandSpec BandSpec::coordinate_defaults(BandMode mode) {
    return BandSpec{mode, ThresholdUnits::coordinate_sum, 80.0, 5.0, 5.0, 80.0};
}

BandSpec BandSpec::percentile_defaults(BandMode mode) {
    return BandSpec{mode, ThresholdUnits::percentile, 60.0, 5.0, 7.0, 50.0};
}

void BandSpec::validate() const {
    if (mode == BandMode::mid && !(mid_lower < mid_upper)) {
        throw InvalidArgument("mid band requires lower < upper threshold (got " +
                              std::to_string(mid_lower) + ", " + std::to_string(mid_upper) + ")");
    }
    if (units == ThresholdUnits::percentile) {
        for (double p : {low_pass, high_pass, mid_lower, mid_upper}) {
            if (!(p >= 0.0 && p <= 100.0)) {
                throw InvalidArgument("percentile threshold " + std::to_string(p) +
                                      " outside [0, 100]");
            }
        }
    }
}

FeatureMask make_mask_2d(const BandSpec& spec, std::size_t h, std::size_t w) {
    if (spec.units != ThresholdUnits::coordinate_sum) {
        throw InvalidArgument("2D band mask needs coordinate-sum thresholds");
    }
    spec.validate();
    std::vector<std::uint8_t> bits(h * w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            bits[i * w + j] = passes(spec.mode, static_cast<double>(i + j), spec.low_pass,
                                     spec.high_pass, spec.mid_lower, spec.mid_upper);
        }
    }
    return FeatureMask(h, w, std::move(bits));
}

MaskPair make_mask_pair_1d(const BandSpec& spec, std::size_t h, std::size_t w) {
    if (spec.units != ThresholdUnits::percentile) {
        throw InvalidArgument("1D mask pair needs percentile thresholds");
    }
    spec.validate();
    const auto cols = axis_profile(spec, w);
    const auto rows = axis_profile(spec, h);
    std::vector<std::uint8_t> wbits(h * w), hbits(h * w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            wbits[i * w + j] = cols[j];
            hbits[i * w + j] = rows[i];
        }
    }
    return MaskPair{FeatureMask(h, w, std::move(wbits)), FeatureMask(h, w, std::move(hbits))};
}

}  // namespace fbs
