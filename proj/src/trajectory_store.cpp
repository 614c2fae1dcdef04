// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/trajectory_store.hpp"

#include <cstdio>
#include <system_error>

#include "fbs/errors.hpp"
#include "fbs/tensor_io.hpp"

namespace fbs {

TrajectoryStore::TrajectoryStore(std::optional<std::filesystem::path> spill_dir)
    : spill_dir_(std::move(spill_dir)) {
    if (spill_dir_) {
        std::error_code ec;
        std::filesystem::create_directories(*spill_dir_, ec);
        if (ec) {
            throw TensorFormatError(TensorFormatError::Kind::io,
                                    "cannot create spill directory " + spill_dir_->string());
        }
    }
}

TrajectoryStore::~TrajectoryStore() {
    if (!spill_dir_) return;
    std::error_code ec;
    for (std::size_t k = 0; k < count_; ++k) std::filesystem::remove(path_for(k), ec);
}

std::filesystem::path TrajectoryStore::path_for(std::size_t index) const {
    char name[32];
    std::snprintf(name, sizeof(name), "step_%06zu.fbst", index);
    return *spill_dir_ / name;
}

void TrajectoryStore::push(LatentFeature f) {
    if (spill_dir_) {
        save_tensor(f, path_for(count_));
    } else {
        memory_.push_back(std::move(f));
    }
    ++count_;
}

LatentFeature TrajectoryStore::at(std::size_t index) const {
    if (index >= count_) throw InvalidArgument("trajectory index out of range");
    if (spill_dir_) return load_tensor(path_for(index));
    return memory_[index];
}

}  // namespace fbs
