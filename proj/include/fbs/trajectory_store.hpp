// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "fbs/tensor.hpp"

namespace fbs {

/// Append-only list of trajectory features, indexed by step. Kept in memory
/// unless a spill directory is given, in which case each feature goes to
/// `<dir>/step_<index>.fbst` in the tensor file format and is removed again
/// when the store is destroyed.
class TrajectoryStore {
public:
    explicit TrajectoryStore(std::optional<std::filesystem::path> spill_dir = std::nullopt);
    ~TrajectoryStore();
    TrajectoryStore(const TrajectoryStore&) = delete;
    TrajectoryStore& operator=(const TrajectoryStore&) = delete;

    void push(LatentFeature f);
    LatentFeature at(std::size_t index) const;
    std::size_t size() const noexcept { return count_; }
    bool spilled() const noexcept { return spill_dir_.has_value(); }

private:
    std::filesystem::path path_for(std::size_t index) const;

    std::optional<std::filesystem::path> spill_dir_;
    std::vector<LatentFeature> memory_;
    std::size_t count_ = 0;
};

}  // namespace fbs
