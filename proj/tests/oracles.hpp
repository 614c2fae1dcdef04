// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations used as test oracles. Each one is the
// literal summation or predicate from the definitions, evaluated in long
// double and independent of the library's cached-basis code paths.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fbs/tensor.hpp"

namespace oracle {

using fbs::LatentFeature;
using fbs::Shape;

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

inline long double c_of(std::size_t k) { return k == 0 ? 1.0L / std::sqrt(2.0L) : 1.0L; }

// 2D DCT-II: S(u,v) = 2/sqrt(hw) m(u) m(v) sum_i sum_j z(i,j) cos(pi u (2i+1)/2h) cos(pi v (2j+1)/2w)
inline LatentFeature dct2d(const LatentFeature& z) {
    const std::size_t h = z.height(), w = z.width();
    std::vector<double> out(z.size());
    for (std::size_t c = 0; c < z.channels(); ++c)
        for (std::size_t u = 0; u < h; ++u)
            for (std::size_t v = 0; v < w; ++v) {
                long double s = 0;
                for (std::size_t i = 0; i < h; ++i)
                    for (std::size_t j = 0; j < w; ++j)
                        s += z.at(c, i, j) * std::cos(kPi * u * (2 * i + 1) / (2.0L * h)) *
                             std::cos(kPi * v * (2 * j + 1) / (2.0L * w));
                out[(c * h + u) * w + v] =
                    static_cast<double>(2.0L / std::sqrt(static_cast<long double>(h * w)) * c_of(u) * c_of(v) * s);
            }
    return LatentFeature(z.shape(), std::move(out));
}

// 2D DCT-III (inverse): z(i,j) = 2/sqrt(hw) sum_u sum_v m(u) m(v) S(u,v) cos(..) cos(..)
inline LatentFeature idct2d(const LatentFeature& s) {
    const std::size_t h = s.height(), w = s.width();
    std::vector<double> out(s.size());
    for (std::size_t c = 0; c < s.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                long double acc = 0;
                for (std::size_t u = 0; u < h; ++u)
                    for (std::size_t v = 0; v < w; ++v)
                        acc += c_of(u) * c_of(v) * s.at(c, u, v) * std::cos(kPi * u * (2 * i + 1) / (2.0L * h)) *
                               std::cos(kPi * v * (2 * j + 1) / (2.0L * w));
                out[(c * h + i) * w + j] = static_cast<double>(2.0L / std::sqrt(static_cast<long double>(h * w)) * acc);
            }
    return LatentFeature(s.shape(), std::move(out));
}

// 1D DCT-II along one axis: X(k) = sqrt(2/L) c_k sum_l x(l) cos(pi k (2l+1) / 2L)
inline LatentFeature dct1d(const LatentFeature& z, bool along_width) {
    const std::size_t h = z.height(), w = z.width(), L = along_width ? w : h;
    std::vector<double> out(z.size());
    for (std::size_t c = 0; c < z.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                const std::size_t k = along_width ? j : i;
                long double s = 0;
                for (std::size_t l = 0; l < L; ++l) {
                    const double x = along_width ? z.at(c, i, l) : z.at(c, l, j);
                    s += x * std::cos(kPi * k * (2 * l + 1) / (2.0L * L));
                }
                out[(c * h + i) * w + j] = static_cast<double>(std::sqrt(2.0L / L) * c_of(k) * s);
            }
    return LatentFeature(z.shape(), std::move(out));
}

// 1D DCT-III along one axis: x(l) = sqrt(2/L) sum_k c_k X(k) cos(pi k (2l+1) / 2L)
inline LatentFeature idct1d(const LatentFeature& s, bool along_width) {
    const std::size_t h = s.height(), w = s.width(), L = along_width ? w : h;
    std::vector<double> out(s.size());
    for (std::size_t c = 0; c < s.channels(); ++c)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                const std::size_t l = along_width ? j : i;
                long double acc = 0;
                for (std::size_t k = 0; k < L; ++k) {
                    const double x = along_width ? s.at(c, i, k) : s.at(c, k, j);
                    acc += c_of(k) * x * std::cos(kPi * k * (2 * l + 1) / (2.0L * L));
                }
                out[(c * h + i) * w + j] = static_cast<double>(std::sqrt(2.0L / L) * acc);
            }
    return LatentFeature(s.shape(), std::move(out));
}

// Mask predicates, zero-based coordinates.
inline bool lp2d(std::size_t i, std::size_t j, double th) { return static_cast<double>(i + j) <= th; }
inline bool hp2d(std::size_t i, std::size_t j, double th) { return static_cast<double>(i + j) > th; }
inline bool mp2d(std::size_t i, std::size_t j, double th1, double th2) {
    const double s = static_cast<double>(i + j);
    return th1 < s && s <= th2;
}
// Percentile predicates: index k of an axis of length L against pt * L / 100,
// in exact rational arithmetic (pt given as a fraction num/den).
inline bool pct_le(std::size_t k, std::int64_t pt_num, std::int64_t pt_den, std::size_t L) {
    return static_cast<std::int64_t>(k) * 100 * pt_den <= pt_num * static_cast<std::int64_t>(L);
}

inline LatentFeature random_feature(Shape s, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, scale);
    std::vector<double> v(s.numel());
    for (auto& x : v) x = nd(gen);
    return LatentFeature(s, std::move(v));
}

inline double max_abs_diff(const LatentFeature& a, const LatentFeature& b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double norm(const LatentFeature& a) {
    long double s = 0;
    for (double x : a.values()) s += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(s));
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("fbs_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
