// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "fbs/errors.hpp"

namespace fbs {

std::string to_string(const Shape& s) {
    return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
           std::to_string(s.width);
}

LatentFeature::LatentFeature(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
    if (shape_.channels < 1 || shape_.height < 2 || shape_.width < 2) {
        throw ShapeError("latent feature shape " + to_string(shape_) +
                         " violates c >= 1, h >= 2, w >= 2");
    }
    if (data_.size() != shape_.numel()) {
        throw ShapeError("latent feature payload has " + std::to_string(data_.size()) +
                         " values, shape " + to_string(shape_) + " needs " +
                         std::to_string(shape_.numel()));
    }
}

LatentFeature LatentFeature::zeros(Shape shape) { return filled(shape, 0.0); }

LatentFeature LatentFeature::filled(Shape shape, double value) {
    return LatentFeature(shape, std::vector<double>(shape.numel(), value));
}

bool LatentFeature::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

FeatureMask::FeatureMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
    if (height_ == 0 || width_ == 0) throw ShapeError("mask must be non-empty");
    if (bits_.size() != height_ * width_) {
        throw ShapeError("mask payload size does not match " + std::to_string(height_) + "x" +
                         std::to_string(width_));
    }
    for (auto b : bits_) {
        if (b > 1) throw InvalidArgument("mask is not binary");
    }
}

FeatureMask FeatureMask::from_values(std::size_t height, std::size_t width,
                                     std::span<const double> values) {
    std::vector<std::uint8_t> bits(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] == 0.0) {
            bits[k] = 0;
        } else if (values[k] == 1.0) {
            bits[k] = 1;
        } else {
            throw InvalidArgument("mask is not binary: element " + std::to_string(k) + " = " +
                                  std::to_string(values[k]));
        }
    }
    return FeatureMask(height, width, std::move(bits));
}

FeatureMask FeatureMask::from_tensor(const LatentFeature& t) {
    if (t.channels() != 1) throw ShapeError("mask tensor must have exactly one channel");
    return from_values(t.height(), t.width(), t.values());
}

FeatureMask FeatureMask::ones(std::size_t height, std::size_t width) {
    return FeatureMask(height, width, std::vector<std::uint8_t>(height * width, 1));
}

FeatureMask FeatureMask::zeros(std::size_t height, std::size_t width) {
    return FeatureMask(height, width, std::vector<std::uint8_t>(height * width, 0));
}

std::size_t FeatureMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

FeatureMask FeatureMask::complement() const {
    std::vector<std::uint8_t> out(bits_.size());
    std::transform(bits_.begin(), bits_.end(), out.begin(),
                   [](std::uint8_t b) { return static_cast<std::uint8_t>(1 - b); });
    return FeatureMask(height_, width_, std::move(out));
}

LatentFeature FeatureMask::to_tensor() const {
    std::vector<double> v(bits_.begin(), bits_.end());
    return LatentFeature(Shape{1, height_, width_}, std::move(v));
}

void require_same_shape(const LatentFeature& a, const LatentFeature& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
    }
}

void require_mask_fits(const LatentFeature& z, const FeatureMask& m, const char* op) {
    if (m.height() != z.height() || m.width() != z.width()) {
        throw ShapeError(std::string(op) + ": mask " + std::to_string(m.height()) + "x" +
                         std::to_string(m.width()) + " does not match feature " +
                         to_string(z.shape()));
    }
}

double frobenius_norm(const LatentFeature& z) {
    double acc = 0.0;
    for (double v : z.values()) acc += v * v;
    return std::sqrt(acc);
}

double max_abs_diff(const LatentFeature& a, const LatentFeature& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double relative_l2(const LatentFeature& a, const LatentFeature& b) {
    require_same_shape(a, b, "relative_l2");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return std::sqrt(num) / std::sqrt(den);
}

}  // namespace fbs
