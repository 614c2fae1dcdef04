// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/band_energy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fbs/dct.hpp"
#include "fbs/errors.hpp"

namespace fbs {
namespace {

// r <= cut, in the partition's units.
bool within(const BandPartition& p, double cut, std::size_t i, std::size_t j, std::size_t h,
            std::size_t w) {
    if (p.units == ThresholdUnits::coordinate_sum) return static_cast<double>(i + j) <= cut;
    return 100.0 * static_cast<double>(i) <= cut * static_cast<double>(h) &&
           100.0 * static_cast<double>(j) <= cut * static_cast<double>(w);
}

}  // namespace

Band BandPartition::classify(std::size_t i, std::size_t j, std::size_t h, std::size_t w) const {
    if (within(*this, lower, i, j, h, w)) return Band::low;
    if (within(*this, upper, i, j, h, w)) return Band::mid;
    return Band::high;
}

void BandPartition::validate() const {
    if (!(lower < upper)) throw InvalidArgument("band partition needs lower < upper");
    if (units == ThresholdUnits::percentile && (lower < 0.0 || upper > 100.0)) {
        throw InvalidArgument("percentile band cuts must lie in [0, 100]");
    }
}

FeatureMask band_region(const BandPartition& p, Band band, std::size_t h, std::size_t w) {
    std::vector<std::uint8_t> bits(h * w);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) bits[i * w + j] = p.classify(i, j, h, w) == band;
    return FeatureMask(h, w, std::move(bits));
}

BandEnergies BandEnergies::fractions() const noexcept {
    const double t = total();
    if (t == 0.0) return {};
    return {low / t, mid / t, high / t};
}

BandEnergies band_energies_of_spectrum(const LatentFeature& spectrum, const BandPartition& p) {
    p.validate();
    const std::size_t h = spectrum.height(), w = spectrum.width();
    std::vector<Band> band(h * w);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) band[i * w + j] = p.classify(i, j, h, w);
    BandEnergies e;
    for (std::size_t c = 0; c < spectrum.channels(); ++c) {
        const auto plane = spectrum.channel(c);
        for (std::size_t k = 0; k < plane.size(); ++k) {
            const double v = plane[k] * plane[k];
            switch (band[k]) {
                case Band::low: e.low += v; break;
                case Band::mid: e.mid += v; break;
                case Band::high: e.high += v; break;
            }
        }
    }
    return e;
}

BandEnergies band_energies(const LatentFeature& z, const BandPartition& p) {
    return band_energies_of_spectrum(dct2d(z), p);
}

double region_energy(const LatentFeature& z, const FeatureMask& region) {
    require_mask_fits(z, region, "region_energy");
    const auto s = dct2d(z);
    double e = 0.0;
    const auto bits = region.bits();
    for (std::size_t c = 0; c < s.channels(); ++c) {
        const auto plane = s.channel(c);
        for (std::size_t k = 0; k < plane.size(); ++k) {
            if (bits[k]) e += plane[k] * plane[k];
        }
    }
    return e;
}

double spectral_correlation(const LatentFeature& a, const LatentFeature& b,
                            const FeatureMask& region) {
    require_same_shape(a, b, "spectral_correlation");
    require_mask_fits(a, region, "spectral_correlation");
    const auto sa = dct2d(a);
    const auto sb = dct2d(b);
    const auto bits = region.bits();
    const std::size_t plane = a.height() * a.width();
    double n = 0, ma = 0, mb = 0;
    for (std::size_t k = 0; k < sa.size(); ++k) {
        if (!bits[k % plane]) continue;
        n += 1;
        ma += sa[k];
        mb += sb[k];
    }
    if (n < 2) return 0.0;
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t k = 0; k < sa.size(); ++k) {
        if (!bits[k % plane]) continue;
        const double da = sa[k] - ma, db = sb[k] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

}  // namespace fbs
