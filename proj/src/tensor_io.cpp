// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include "fbs/errors.hpp"

namespace fbs {
namespace {

using Kind = TensorFormatError::Kind;

template <typename U>
void put_le(std::vector<std::byte>& out, U v) {
    for (std::size_t b = 0; b < sizeof(U); ++b) {
        out.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xFFu));
    }
}

template <typename U>
U get_le(const std::byte* p) {
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
        v |= static_cast<U>(std::to_integer<std::uint8_t>(p[b])) << (8 * b);
    }
    return v;
}

}  // namespace

void append_f64_le(std::vector<std::byte>& out, std::span<const double> values) {
    out.reserve(out.size() + values.size() * 8);
    for (double v : values) put_le(out, std::bit_cast<std::uint64_t>(v));
}

void append_f32_le(std::vector<std::byte>& out, std::span<const double> values) {
    out.reserve(out.size() + values.size() * 4);
    for (double v : values) put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::vector<double> read_f64_le(std::span<const std::byte> bytes) {
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + 8 * k));
    }
    return out;
}

std::vector<double> read_f32_le(std::span<const std::byte> bytes) {
    std::vector<double> out(bytes.size() / 4);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::bit_cast<float>(get_le<std::uint32_t>(bytes.data() + 4 * k));
    }
    return out;
}

std::vector<std::byte> encode_tensor(const LatentFeature& f) {
    if (!f.all_finite()) {
        throw TensorFormatError(Kind::non_finite, "refusing to serialize non-finite tensor");
    }
    std::vector<std::byte> out;
    out.reserve(kTensorHeaderBytes + f.size() * 8);
    for (char c : kTensorMagic) out.push_back(static_cast<std::byte>(c));
    put_le<std::uint64_t>(out, f.channels());
    put_le<std::uint64_t>(out, f.height());
    put_le<std::uint64_t>(out, f.width());
    out.resize(kTensorHeaderBytes, std::byte{0});
    append_f64_le(out, f.values());
    return out;
}

LatentFeature decode_tensor(std::span<const std::byte> bytes) {
    if (bytes.size() < kTensorHeaderBytes) {
        throw TensorFormatError(Kind::truncated, "tensor header truncated (" +
                                                     std::to_string(bytes.size()) + " bytes)");
    }
    if (std::memcmp(bytes.data(), kTensorMagic, sizeof(kTensorMagic)) != 0) {
        throw TensorFormatError(Kind::bad_magic, "bad tensor magic");
    }
    const auto c = get_le<std::uint64_t>(bytes.data() + 8);
    const auto h = get_le<std::uint64_t>(bytes.data() + 16);
    const auto w = get_le<std::uint64_t>(bytes.data() + 24);
    const std::size_t payload = bytes.size() - kTensorHeaderBytes;
    if (payload % 8 != 0) {
        throw TensorFormatError(Kind::truncated,
                                "tensor payload truncated mid-element (" +
                                    std::to_string(payload) + " bytes)");
    }
    // Overflow-safe: compare element counts by division.
    const std::size_t elements = payload / 8;
    const bool matches = c != 0 && h != 0 && w != 0 && elements % c == 0 &&
                         (elements / c) % h == 0 && (elements / c / h) == w;
    if (!matches) {
        throw TensorFormatError(Kind::shape_mismatch,
                                "tensor header declares " + std::to_string(c) + "x" +
                                    std::to_string(h) + "x" + std::to_string(w) + " but payload has " +
                                    std::to_string(elements) + " elements");
    }
    try {
        return LatentFeature(Shape{c, h, w}, read_f64_le(bytes.subspan(kTensorHeaderBytes)));
    } catch (const ShapeError& e) {
        throw TensorFormatError(Kind::bad_shape, e.what());
    }
}

void save_tensor(const LatentFeature& f, const std::filesystem::path& path) {
    const auto bytes = encode_tensor(f);
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw TensorFormatError(Kind::io, "cannot open " + tmp.string() + " for writing");
        os.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
        if (!os) throw TensorFormatError(Kind::io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw TensorFormatError(Kind::io, "cannot move tensor into place at " + path.string());
    }
}

LatentFeature load_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw TensorFormatError(Kind::io, "cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) throw TensorFormatError(Kind::io, "read failed: " + path.string());
    try {
        return decode_tensor(std::as_bytes(std::span<const char>(raw)));
    } catch (const TensorFormatError& e) {
        throw TensorFormatError(e.kind(), path.string() + ": " + e.what());
    }
}

FeatureMask downsample_mask(const FeatureMask& src, std::size_t target_h, std::size_t target_w) {
    if (target_h == 0 || target_w == 0) throw InvalidArgument("downsample target must be non-empty");
    if (target_h > src.height() || target_w > src.width()) {
        throw InvalidArgument("downsample_mask only scales down (" + std::to_string(src.height()) +
                              "x" + std::to_string(src.width()) + " -> " +
                              std::to_string(target_h) + "x" + std::to_string(target_w) + ")");
    }
    std::vector<std::uint8_t> bits(target_h * target_w);
    for (std::size_t i = 0; i < target_h; ++i) {
        const std::size_t si = ((2 * i + 1) * src.height()) / (2 * target_h);
        for (std::size_t j = 0; j < target_w; ++j) {
            const std::size_t sj = ((2 * j + 1) * src.width()) / (2 * target_w);
            bits[i * target_w + j] = src.at(si, sj) ? 1 : 0;
        }
    }
    return FeatureMask(target_h, target_w, std::move(bits));
}

}  // namespace fbs
