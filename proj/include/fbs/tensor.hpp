// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fbs {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t plane() const noexcept { return height * width; }
    std::size_t numel() const noexcept { return channels * height * width; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// A c x h x w real tensor stored row-major in (channel, row, column) order.
///
/// Holds latent features, their DCT spectra and any intermediate trajectory
/// state. Construction validates the shape (c >= 1, h >= 2, w >= 2) and the
/// payload length but not finiteness; use `all_finite()` where it matters.
class LatentFeature {
public:
    LatentFeature(Shape shape, std::vector<double> data);

    static LatentFeature zeros(Shape shape);
    static LatentFeature filled(Shape shape, double value);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t channels() const noexcept { return shape_.channels; }
    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return data_.size(); }

    double at(std::size_t c, std::size_t i, std::size_t j) const {
        return data_[(c * shape_.height + i) * shape_.width + j];
    }
    double operator[](std::size_t k) const { return data_[k]; }

    std::span<const double> values() const noexcept { return data_; }
    std::span<const double> channel(std::size_t c) const {
        return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
    }

    bool all_finite() const noexcept;

    /// Releases the storage for in-place reuse by the owner.
    std::vector<double> take() && { return std::move(data_); }

    friend bool operator==(const LatentFeature&, const LatentFeature&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Binary h x w mask. Gates a LatentFeature spatially or spectrally,
/// broadcast over channels.
class FeatureMask {
public:
    FeatureMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits);

    /// Takes a real-valued plane and rejects anything other than exact 0 or 1.
    static FeatureMask from_values(std::size_t height, std::size_t width,
                                   std::span<const double> values);
    /// Single-channel tensor to mask; rejects non-binary content.
    static FeatureMask from_tensor(const LatentFeature& t);

    static FeatureMask ones(std::size_t height, std::size_t width);
    static FeatureMask zeros(std::size_t height, std::size_t width);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    bool at(std::size_t i, std::size_t j) const { return bits_[i * width_ + j] != 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept;
    bool all_set() const noexcept { return count() == bits_.size(); }
    bool none_set() const noexcept { return count() == 0; }

    FeatureMask complement() const;
    LatentFeature to_tensor() const;

    friend bool operator==(const FeatureMask&, const FeatureMask&) = default;

private:
    std::size_t height_;
    std::size_t width_;
    std::vector<std::uint8_t> bits_;
};

void require_same_shape(const LatentFeature& a, const LatentFeature& b, const char* op);
void require_mask_fits(const LatentFeature& z, const FeatureMask& m, const char* op);

double frobenius_norm(const LatentFeature& z);
double max_abs_diff(const LatentFeature& a, const LatentFeature& b);
/// ||a - b||_2 / ||b||_2
double relative_l2(const LatentFeature& a, const LatentFeature& b);

}  // namespace fbs
