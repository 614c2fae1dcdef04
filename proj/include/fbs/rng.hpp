// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "fbs/tensor.hpp"

namespace fbs {

/// Reproducible random source.
///
/// The std engines are fully specified but the std distributions are not, so
/// the derived draws are spelled out here:
///   uniform()     (next >> 11) * 2^-53, in [0, 1)
///   uniform_int   rejection sampling on the raw 64-bit output
///   normal()      Box-Muller on two uniforms, u1 mapped to (0, 1]; both
///                 outputs of a pair are consumed in order
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    /// Uniform over the closed range [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
    bool coin() { return (next_u64() >> 63) != 0; }
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// i.i.d. N(0, 1) tensor drawn in storage order.
LatentFeature standard_normal(const Shape& shape, std::uint64_t seed);

}  // namespace fbs
