// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/dct.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <vector>

namespace fbs {
namespace {

std::vector<double> build_basis(std::size_t len) {
    std::vector<double> b(len * len);
    const double n = static_cast<double>(len);
    const double scale = std::sqrt(2.0 / n);
    for (std::size_t k = 0; k < len; ++k) {
        const double ck = k == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
        for (std::size_t l = 0; l < len; ++l) {
            const double arg = std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(2 * l + 1) / (2.0 * n);
            b[k * len + l] = scale * ck * std::cos(arg);
        }
    }
    return b;
}

class BasisCache {
public:
    std::span<const double> get(std::size_t len) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = bases_.find(len); it != bases_.end()) return *it->second;
        }
        auto fresh = std::make_unique<std::vector<double>>(build_basis(len));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = bases_.try_emplace(len, std::move(fresh));
        return *it->second;
    }

private:
    std::shared_mutex mutex_;
    std::map<std::size_t, std::unique_ptr<const std::vector<double>>> bases_;
};

BasisCache& cache() {
    static BasisCache instance;
    return instance;
}

void run_axis(std::span<const double> in, std::span<double> out, const Shape& shape, Axis axis,
              kernels::BasisSide side, Exec exec) {
    const std::size_t len = axis == Axis::width ? shape.width : shape.height;
    const auto basis = dct_basis(len);
    if (exec == Exec::serial) {
        kernels::serial::apply_along_axis(in, out, shape, axis, basis, side);
    } else {
        kernels::omp::apply_along_axis(in, out, shape, axis, basis, side);
    }
}

LatentFeature transform_1d(const LatentFeature& z, Axis axis, kernels::BasisSide side,
                           Exec exec) {
    std::vector<double> out(z.size());
    run_axis(z.values(), out, z.shape(), axis, side, exec);
    return LatentFeature(z.shape(), std::move(out));
}

LatentFeature transform_2d(const LatentFeature& z, kernels::BasisSide side, Exec exec) {
    std::vector<double> tmp(z.size());
    std::vector<double> out(z.size());
    run_axis(z.values(), tmp, z.shape(), Axis::width, side, exec);
    run_axis(tmp, out, z.shape(), Axis::height, side, exec);
    return LatentFeature(z.shape(), std::move(out));
}

}  // namespace

std::span<const double> dct_basis(std::size_t len) { return cache().get(len); }

LatentFeature dct2d(const LatentFeature& z, Exec exec) {
    return transform_2d(z, kernels::BasisSide::rows, exec);
}

LatentFeature idct2d(const LatentFeature& spectrum, Exec exec) {
    return transform_2d(spectrum, kernels::BasisSide::columns, exec);
}

LatentFeature dct1d_axis(const LatentFeature& z, Axis axis, Exec exec) {
    return transform_1d(z, axis, kernels::BasisSide::rows, exec);
}

LatentFeature idct1d_axis(const LatentFeature& spectrum, Axis axis, Exec exec) {
    return transform_1d(spectrum, axis, kernels::BasisSide::columns, exec);
}

}  // namespace fbs
