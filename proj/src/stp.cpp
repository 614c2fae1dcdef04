// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/stp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fbs/errors.hpp"
#include "fbs/rng.hpp"

namespace fbs {
namespace {

std::pair<std::size_t, std::size_t> rotated_dims(std::size_t h, std::size_t w, int quarter_turns) {
    return quarter_turns % 2 == 0 ? std::pair{h, w} : std::pair{w, h};
}

// Interpolates between a and b without leaving [min(a,b), max(a,b)].
double lerp_bounded(double a, double b, double f) {
    const double v = a + (b - a) * f;
    return std::clamp(v, std::min(a, b), std::max(a, b));
}

struct Tap {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

std::vector<Tap> resize_taps(std::size_t src_len, std::size_t dst_len, ResizeKernel kernel) {
    std::vector<Tap> taps(dst_len);
    for (std::size_t d = 0; d < dst_len; ++d) {
        if (kernel == ResizeKernel::nearest) {
            const std::size_t s = ((2 * d + 1) * src_len) / (2 * dst_len);
            taps[d] = {s, s, 0.0};
            continue;
        }
        double s = (static_cast<double>(d) + 0.5) * static_cast<double>(src_len) /
                       static_cast<double>(dst_len) -
                   0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
        const auto lo = static_cast<std::size_t>(std::floor(s));
        const std::size_t hi = std::min(lo + 1, src_len - 1);
        taps[d] = {lo, hi, s - static_cast<double>(lo)};
    }
    return taps;
}

}  // namespace

std::string_view to_string(ResizeKernel k) {
    return k == ResizeKernel::bilinear ? "bilinear" : "nearest";
}

ResizeKernel parse_resize_kernel(std::string_view s) {
    if (s == "bilinear") return ResizeKernel::bilinear;
    if (s == "nearest") return ResizeKernel::nearest;
    throw ConfigError("unknown resize kernel '" + std::string(s) + "'");
}

SpatialTransformParams SpatialTransformParams::identity(std::size_t h, std::size_t w) {
    return SpatialTransformParams{0, false, false, h, w, h, w};
}

SpatialTransformParams stp_sample(std::size_t h, std::size_t w, std::uint64_t seed) {
    if (h < 2 || w < 2) throw InvalidArgument("stp_sample needs h, w >= 2");
    Rng rng(seed);
    SpatialTransformParams p;
    p.quarter_turns = static_cast<int>(rng.uniform_int(0, 3));
    p.hflip = rng.coin();
    p.vflip = rng.coin();
    const auto [rh, rw] = rotated_dims(h, w, p.quarter_turns);
    p.crop_h = rng.uniform_int(rh, 3 * rh);
    p.crop_w = rng.uniform_int(rw, 3 * rw);
    p.crop_top = rng.uniform_int(0, 3 * rh - p.crop_h);
    p.crop_left = rng.uniform_int(0, 3 * rw - p.crop_w);
    return p;
}

void stp_validate(const SpatialTransformParams& p, std::size_t h, std::size_t w) {
    if (p.quarter_turns < 0 || p.quarter_turns > 3) {
        throw InvalidArgument("STP rotation must be 0..3 quarter turns");
    }
    const auto [rh, rw] = rotated_dims(h, w, p.quarter_turns);
    const bool sizes_ok = p.crop_h >= rh && p.crop_h <= 3 * rh && p.crop_w >= rw && p.crop_w <= 3 * rw;
    const bool inside = p.crop_top + p.crop_h <= 3 * rh && p.crop_left + p.crop_w <= 3 * rw;
    if (!sizes_ok || !inside) {
        throw InvalidArgument("STP crop window " + std::to_string(p.crop_h) + "x" +
                              std::to_string(p.crop_w) + "@(" + std::to_string(p.crop_top) + "," +
                              std::to_string(p.crop_left) + ") invalid for expanded grid " +
                              std::to_string(3 * rh) + "x" + std::to_string(3 * rw));
    }
}

LatentFeature rotate_quarter_turns(const LatentFeature& z, int quarter_turns) {
    const int q = ((quarter_turns % 4) + 4) % 4;
    if (q == 0) return z;
    const std::size_t c = z.channels(), h = z.height(), w = z.width();
    const auto [oh, ow] = rotated_dims(h, w, q);
    std::vector<double> out(z.size());
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                double v = 0.0;
                switch (q) {
                    case 1: v = z.at(ch, j, w - 1 - i); break;
                    case 2: v = z.at(ch, h - 1 - i, w - 1 - j); break;
                    case 3: v = z.at(ch, h - 1 - j, i); break;
                }
                out[(ch * oh + i) * ow + j] = v;
            }
        }
    }
    return LatentFeature(Shape{c, oh, ow}, std::move(out));
}

LatentFeature flip_horizontal(const LatentFeature& z) {
    std::vector<double> out(z.size());
    const std::size_t h = z.height(), w = z.width();
    for (std::size_t ch = 0; ch < z.channels(); ++ch)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) out[(ch * h + i) * w + j] = z.at(ch, i, w - 1 - j);
    return LatentFeature(z.shape(), std::move(out));
}

LatentFeature flip_vertical(const LatentFeature& z) {
    std::vector<double> out(z.size());
    const std::size_t h = z.height(), w = z.width();
    for (std::size_t ch = 0; ch < z.channels(); ++ch)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) out[(ch * h + i) * w + j] = z.at(ch, h - 1 - i, j);
    return LatentFeature(z.shape(), std::move(out));
}

LatentFeature mirror_expand(const LatentFeature& z) {
    const std::size_t c = z.channels(), h = z.height(), w = z.width();
    const auto reflect = [](std::size_t x, std::size_t n) {
        // x indexes [0, 3n); the centre tile starts at n.
        if (x < n) return n - 1 - x;
        if (x < 2 * n) return x - n;
        return 3 * n - 1 - x;
    };
    const std::size_t eh = 3 * h, ew = 3 * w;
    std::vector<double> out(c * eh * ew);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < eh; ++i)
            for (std::size_t j = 0; j < ew; ++j)
                out[(ch * eh + i) * ew + j] = z.at(ch, reflect(i, h), reflect(j, w));
    return LatentFeature(Shape{c, eh, ew}, std::move(out));
}

LatentFeature stp_apply(const LatentFeature& z, const SpatialTransformParams& p,
                        ResizeKernel kernel) {
    const std::size_t c = z.channels(), h = z.height(), w = z.width();
    stp_validate(p, h, w);

    auto t = rotate_quarter_turns(z, p.quarter_turns);
    if (p.hflip) t = flip_horizontal(t);
    if (p.vflip) t = flip_vertical(t);
    const auto expanded = mirror_expand(t);

    const auto rows = resize_taps(p.crop_h, h, kernel);
    const auto cols = resize_taps(p.crop_w, w, kernel);
    std::vector<double> out(z.size());
    for (std::size_t ch = 0; ch < c; ++ch) {
        const auto px = [&](std::size_t i, std::size_t j) {
            return expanded.at(ch, p.crop_top + i, p.crop_left + j);
        };
        for (std::size_t i = 0; i < h; ++i) {
            const Tap& r = rows[i];
            for (std::size_t j = 0; j < w; ++j) {
                const Tap& q = cols[j];
                const double top = lerp_bounded(px(r.lo, q.lo), px(r.lo, q.hi), q.frac);
                const double bottom = lerp_bounded(px(r.hi, q.lo), px(r.hi, q.hi), q.frac);
                out[(ch * h + i) * w + j] = lerp_bounded(top, bottom, r.frac);
            }
        }
    }
    return LatentFeature(z.shape(), std::move(out));
}

}  // namespace fbs
