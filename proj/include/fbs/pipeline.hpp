// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "fbs/band_energy.hpp"
#include "fbs/band_masks.hpp"
#include "fbs/denoiser.hpp"
#include "fbs/diffusion.hpp"
#include "fbs/stp.hpp"
#include "fbs/tensor.hpp"

namespace fbs {

enum class Variant { fbsdiff, fbsdiffpp };

/// How band substitution is scheduled over the early section.
enum class SubstitutionStyle {
    per_step,       // every step from T down to switch + 1
    once,           // only the step that lands on the switch step
    full_spectrum,  // every early step, whole spectrum
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);
std::string_view to_string(SubstitutionStyle s);
SubstitutionStyle parse_substitution_style(std::string_view s);

struct PipelineConfig {
    Variant variant = Variant::fbsdiffpp;
    BandSpec band = BandSpec::percentile_defaults(BandMode::low);
    std::size_t steps = 50;             // T
    std::size_t inversion_steps = 1000; // T_inv, FBSDiff only
    double lambda = 0.5;
    double omega = 7.5;
    std::uint64_t seed = 0;             // draws the sampling start noise
    SubstitutionStyle substitution = SubstitutionStyle::per_step;

    bool stp_enabled = false;
    std::uint64_t stp_seed = 0;
    std::optional<SpatialTransformParams> stp_params;  // overrides sampling from stp_seed
    ResizeKernel stp_resize = ResizeKernel::bilinear;

    std::size_t n_train = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    /// Externally supplied abar table (t = 1..n_train); replaces the linear betas.
    std::vector<double> alpha_bar;

    BandPartition report_partition;
    std::optional<std::filesystem::path> spill_dir;

    /// FBSDiff defaults: T_inv = 1000, T = 50, omega = 7.5, lambda = 0.5, th_lp = 80.
    static PipelineConfig fbsdiff_defaults(BandMode mode = BandMode::low);
    /// FBSDiff++ defaults: T = 50, omega = 7.5, lambda = 0.5, pt_lp = 60.
    static PipelineConfig fbsdiffpp_defaults(BandMode mode = BandMode::low);

    /// Rounds lambda * T half-up.
    std::size_t switch_step() const;
    Schedule schedule(std::size_t grid_steps) const;
    void validate() const;
};

/// Closed-form denoiser usage of one run.
CallCounts expected_calls(const PipelineConfig& cfg);

struct BandTraceRow {
    std::size_t step = 0;    // grid index of the sample after this update
    Timestep timestep = 0;
    bool substituted = false;
    BandEnergies sample;     // z~ after the update, under report_partition
    /// Spectral energy inside the substituted region (sample after the
    /// update, and the guide feature used). Zero when nothing was substituted.
    double region_sample = 0.0;
    double region_guide = 0.0;
};

struct PhaseTiming {
    double inversion_seconds = 0.0;
    double sampling_seconds = 0.0;
};

struct RunReport {
    LatentFeature output;
    CallCounts denoiser_calls;
    std::vector<BandTraceRow> trace;
    std::size_t switch_step = 0;
    /// Sampling and guiding features at the switch step, after substitution.
    std::optional<LatentFeature> sample_at_switch;
    std::optional<LatentFeature> guide_at_switch;
    /// FBSDiff: end of the reconstruction trajectory.
    std::optional<LatentFeature> reconstruction;
    /// Style-specific creation: the parameters drawn for the run, and those
    /// actually applied at each substitution step.
    std::optional<SpatialTransformParams> stp_params;
    std::vector<SpatialTransformParams> stp_applied;
    PhaseTiming timing;
};

/// Three-trajectory pipeline: T_inv-step inversion, then a null-text
/// reconstruction trajectory and a CFG sampling trajectory run side by side,
/// with 2D band substitution from reconstruction into sample over the early
/// section.
RunReport run_fbsdiff(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d);

/// Two-trajectory pipeline: T-step inversion whose stored features, read in
/// reverse, guide the CFG sampling trajectory through adaptive substitution.
RunReport run_fbsdiffpp(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d);

/// FBSDiff++ restricted to the region set in `pixel_mask`: after every
/// sampling step the sample outside the (downsampled) mask is reset to the
/// aligned inversion feature, and at the last step to z0 itself.
RunReport run_localized(const LatentFeature& z0, const FeatureMask& pixel_mask,
                        const PipelineConfig& cfg, Denoiser& d);

/// FBSDiff++ with low-band substitution from guide features passed through a
/// fixed spatial transformation, so style carries over but layout does not.
RunReport run_style_specific(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d);

}  // namespace fbs
