// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fbs/tensor.hpp"

namespace fbs {

// Tensor file layout, little-endian throughout:
//   [0, 8)    magic "FBSTNSR1"
//   [8, 32)   u64 channels, u64 height, u64 width
//   [32, 48)  reserved, zero
//   [48, ...) c*h*w IEEE-754 float64 in (c, i, j) order
inline constexpr std::size_t kTensorHeaderBytes = 48;
inline constexpr char kTensorMagic[8] = {'F', 'B', 'S', 'T', 'N', 'S', 'R', '1'};

std::vector<std::byte> encode_tensor(const LatentFeature& f);
LatentFeature decode_tensor(std::span<const std::byte> bytes);

/// Writes atomically (temp file + rename) so a failed save leaves no partial file.
void save_tensor(const LatentFeature& f, const std::filesystem::path& path);
LatentFeature load_tensor(const std::filesystem::path& path);

/// Nearest-neighbour downscale of a binary pixel mask, sampling source pixel
/// floor((i + 1/2) * H / target_h) for output row i (and likewise columns).
FeatureMask downsample_mask(const FeatureMask& src, std::size_t target_h, std::size_t target_w);

// Little-endian float payload helpers shared with the bridge wire format.
void append_f64_le(std::vector<std::byte>& out, std::span<const double> values);
void append_f32_le(std::vector<std::byte>& out, std::span<const double> values);
std::vector<double> read_f64_le(std::span<const std::byte> bytes);
std::vector<double> read_f32_le(std::span<const std::byte> bytes);

}  // namespace fbs
