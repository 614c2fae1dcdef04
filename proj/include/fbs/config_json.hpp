// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "fbs/pipeline.hpp"

namespace fbs {

nlohmann::json to_json(const BandSpec& b);
nlohmann::json to_json(const BandPartition& p);
nlohmann::json to_json(const SpatialTransformParams& p);
nlohmann::json to_json(const PipelineConfig& cfg);
nlohmann::json to_json(const BandEnergies& e);
nlohmann::json to_json(const CallCounts& c);

SpatialTransformParams stp_params_from_json(const nlohmann::json& j);

/// Builds a config from JSON. Missing keys take the variant's defaults (band
/// thresholds follow the variant and mode); unknown keys are a ConfigError.
/// A run manifest is accepted too: its "config" object is used.
PipelineConfig config_from_json(const nlohmann::json& j);

}  // namespace fbs
