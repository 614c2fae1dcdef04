// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "fbs/errors.hpp"
#include "fbs/rng.hpp"
#include "fbs/substitution.hpp"
#include "fbs/tensor_io.hpp"
#include "fbs/trajectory_store.hpp"

namespace fbs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

LatentFeature cfg_sample_step(const LatentFeature& z, Timestep t_from, Timestep t_to,
                              const Schedule& grid, double omega, Denoiser& d) {
    const auto eps_cond = d.predict(z, t_from, CondId::target_text);
    const auto eps_uncond = d.predict(z, t_from, CondId::null_text);
    return ddim_sample_step(z, t_from, t_to, cfg_eps(eps_cond, eps_uncond, omega), grid);
}

// Null-text DDIM inversion over `grid`. The noise for the move tau[i] -> tau[i+1]
// is predicted at the destination timestep tau[i+1] from the current feature,
// so the predictor is never queried at t = 0. `visit` sees z_1 .. z_T.
LatentFeature invert(const LatentFeature& z0, const Schedule& grid, Denoiser& d,
                     const std::function<void(const LatentFeature&)>& visit) {
    const auto tau = grid.grid();
    LatentFeature z = z0;
    for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
        const auto eps = d.predict(z, tau[i + 1], CondId::null_text);
        z = ddim_invert_step(z, tau[i], tau[i + 1], eps, grid);
        if (visit) visit(z);
    }
    return z;
}

// The union of both 1D masks: the 2D spectral region adafbs takes from the guide.
FeatureMask adaptive_region(const MaskPair& m) {
    std::vector<std::uint8_t> bits(m.width_mask.bits().size());
    for (std::size_t k = 0; k < bits.size(); ++k) {
        bits[k] = m.width_mask.bits()[k] | m.height_mask.bits()[k];
    }
    return FeatureMask(m.width_mask.height(), m.width_mask.width(), std::move(bits));
}

struct SamplingHooks {
    /// Guide feature at grid index idx. Called in descending idx order.
    std::function<LatentFeature(std::size_t idx)> guide;
    /// Call `guide` at every step (it advances its own trajectory) rather than
    /// only where the guide is consumed.
    bool guide_every_step = false;
    std::function<LatentFeature(const LatentFeature& guide, const LatentFeature& sample)> substitute;
    std::optional<FeatureMask> region;
    /// Spatial calibration after each update (localized manipulation).
    std::function<LatentFeature(std::size_t idx, const LatentFeature& sample)> calibrate;
};

bool substitutes_at(const PipelineConfig& cfg, std::size_t k, std::size_t s) {
    if (cfg.substitution == SubstitutionStyle::once) return k == s + 1;
    return k > s;
}

LatentFeature sample_guided(const LatentFeature& z_T, const Schedule& grid, const PipelineConfig& cfg,
                            Denoiser& d, const SamplingHooks& hooks, RunReport& report) {
    const auto tau = grid.grid();
    const std::size_t T = grid.steps();
    const std::size_t s = cfg.switch_step();
    report.switch_step = s;

    LatentFeature z = z_T;
    if (s == T) report.sample_at_switch = z;
    for (std::size_t k = T; k >= 1; --k) {
        const std::size_t idx = k - 1;
        const bool active = substitutes_at(cfg, k, s);
        std::optional<LatentFeature> guide;
        if (hooks.guide_every_step || active || hooks.calibrate) guide = hooks.guide(idx);

        z = cfg_sample_step(z, tau[k], tau[idx], grid, cfg.omega, d);

        BandTraceRow row;
        if (active) {
            z = hooks.substitute(*guide, z);
            row.substituted = true;
            row.region_guide = region_energy(*guide, *hooks.region);
            row.region_sample = region_energy(z, *hooks.region);
        }
        if (hooks.calibrate) z = hooks.calibrate(idx, z);

        row.step = idx;
        row.timestep = tau[idx];
        row.sample = band_energies(z, cfg.report_partition);
        report.trace.push_back(row);

        if (idx == s) {
            report.sample_at_switch = z;
            if (guide) report.guide_at_switch = *guide;
        }
    }
    if (!z.all_finite()) throw std::runtime_error("sampling produced non-finite values");
    return z;
}

void check_accounting(const PipelineConfig& cfg, const CallCounts& used) {
    const auto want = expected_calls(cfg);
    if (used != want) {
        throw std::logic_error("denoiser call accounting mismatch: used " +
                               std::to_string(used.null_text) + "/" + std::to_string(used.target_text) +
                               " (null/target), expected " + std::to_string(want.null_text) + "/" +
                               std::to_string(want.target_text));
    }
}

void require_units(const PipelineConfig& cfg, ThresholdUnits units, const char* what) {
    if (cfg.band.units != units) {
        throw ConfigError(std::string(what) + " requires " + std::string(to_string(units)) +
                          " band thresholds");
    }
}

MaskPair adaptive_masks(const PipelineConfig& cfg, const Shape& shape) {
    if (cfg.substitution == SubstitutionStyle::full_spectrum) {
        return {FeatureMask::ones(shape.height, shape.width), FeatureMask::ones(shape.height, shape.width)};
    }
    return make_mask_pair_1d(cfg.band, shape.height, shape.width);
}

const PipelineConfig& validated(const PipelineConfig& cfg) {
    cfg.validate();
    return cfg;
}

// Shared body of the three FBSDiff++ flavours.
struct AdaptiveRun {
    const LatentFeature& z0;
    const PipelineConfig& cfg;
    Denoiser& d;
    RunReport report{z0, {}, {}, 0, {}, {}, {}, {}, {}, {}};
    Schedule grid;
    TrajectoryStore trajectory;
    CallCounts before;

    AdaptiveRun(const LatentFeature& z, const PipelineConfig& c, Denoiser& den)
        : z0(z), cfg(c), d(den), grid(validated(c).schedule(c.steps)), trajectory(c.spill_dir),
          before(den.call_counts()) {
        require_units(cfg, ThresholdUnits::percentile, "adaptive substitution");
        if (!z0.all_finite()) throw InvalidArgument("source latent contains non-finite values");
    }

    void run_inversion() {
        const auto t0 = Clock::now();
        trajectory.push(z0);
        invert(z0, grid, d, [&](const LatentFeature& z) { trajectory.push(z); });
        report.timing.inversion_seconds = seconds_since(t0);
    }

    RunReport finish(SamplingHooks hooks) {
        const auto t0 = Clock::now();
        const auto z_T = standard_normal(z0.shape(), cfg.seed);
        report.output = sample_guided(z_T, grid, cfg, d, hooks, report);
        report.timing.sampling_seconds = seconds_since(t0);
        report.denoiser_calls = d.call_counts() - before;
        check_accounting(cfg, report.denoiser_calls);
        return std::move(report);
    }
};

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::fbsdiff ? "fbsdiff" : "fbsdiffpp"; }

Variant parse_variant(std::string_view s) {
    if (s == "fbsdiff") return Variant::fbsdiff;
    if (s == "fbsdiffpp") return Variant::fbsdiffpp;
    throw ConfigError("unknown variant '" + std::string(s) + "' (expected fbsdiff|fbsdiffpp)");
}

std::string_view to_string(SubstitutionStyle s) {
    switch (s) {
        case SubstitutionStyle::per_step: return "per_step";
        case SubstitutionStyle::once: return "once";
        case SubstitutionStyle::full_spectrum: return "full_spectrum";
    }
    return "?";
}

SubstitutionStyle parse_substitution_style(std::string_view s) {
    if (s == "per_step") return SubstitutionStyle::per_step;
    if (s == "once") return SubstitutionStyle::once;
    if (s == "full_spectrum") return SubstitutionStyle::full_spectrum;
    throw ConfigError("unknown substitution style '" + std::string(s) + "'");
}

PipelineConfig PipelineConfig::fbsdiff_defaults(BandMode mode) {
    PipelineConfig c;
    c.variant = Variant::fbsdiff;
    c.band = BandSpec::coordinate_defaults(mode);
    c.report_partition = BandPartition{ThresholdUnits::coordinate_sum, 5.0, 80.0};
    return c;
}

PipelineConfig PipelineConfig::fbsdiffpp_defaults(BandMode mode) {
    PipelineConfig c;
    c.variant = Variant::fbsdiffpp;
    c.band = BandSpec::percentile_defaults(mode);
    return c;
}

std::size_t PipelineConfig::switch_step() const {
    return static_cast<std::size_t>(std::floor(lambda * static_cast<double>(steps) + 0.5));
}

Schedule PipelineConfig::schedule(std::size_t grid_steps) const {
    if (!alpha_bar.empty()) {
        if (alpha_bar.size() != n_train) {
            throw ConfigError("alpha_bar table length " + std::to_string(alpha_bar.size()) +
                              " differs from n_train " + std::to_string(n_train));
        }
        return Schedule::from_alpha_bar(alpha_bar, grid_steps);
    }
    return Schedule::linear(n_train, grid_steps, beta_start, beta_end);
}

void PipelineConfig::validate() const {
    if (steps < 1 || steps > n_train) throw ConfigError("steps must lie in [1, n_train]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
    if (!std::isfinite(omega)) throw ConfigError("omega must be finite");
    if (variant == Variant::fbsdiff && (inversion_steps < steps || inversion_steps > n_train)) {
        throw ConfigError("FBSDiff needs steps <= inversion_steps <= n_train");
    }
    try {
        band.validate();
        report_partition.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

CallCounts expected_calls(const PipelineConfig& cfg) {
    const std::uint64_t T = cfg.steps;
    if (cfg.variant == Variant::fbsdiff) return {cfg.inversion_steps + 2 * T, T};
    return {2 * T, T};
}

RunReport run_fbsdiff(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d) {
    cfg.validate();
    if (cfg.variant != Variant::fbsdiff) throw ConfigError("run_fbsdiff needs variant fbsdiff");
    require_units(cfg, ThresholdUnits::coordinate_sum, "FBSDiff");
    if (!z0.all_finite()) throw InvalidArgument("source latent contains non-finite values");

    const auto before = d.call_counts();
    RunReport report{z0, {}, {}, 0, {}, {}, {}, {}, {}, {}};

    auto t0 = Clock::now();
    const auto inversion_grid = cfg.schedule(cfg.inversion_steps);
    const auto z_inv = invert(z0, inversion_grid, d, nullptr);
    report.timing.inversion_seconds = seconds_since(t0);

    t0 = Clock::now();
    const auto grid = cfg.schedule(cfg.steps);
    const auto tau = grid.grid();
    const auto mask = cfg.substitution == SubstitutionStyle::full_spectrum
                          ? FeatureMask::ones(z0.height(), z0.width())
                          : make_mask_2d(cfg.band, z0.height(), z0.width());

    LatentFeature recon = z_inv;
    SamplingHooks hooks;
    hooks.guide_every_step = true;
    hooks.guide = [&](std::size_t idx) {
        const auto eps = d.predict(recon, tau[idx + 1], CondId::null_text);
        recon = ddim_sample_step(recon, tau[idx + 1], tau[idx], eps, grid);
        return recon;
    };
    hooks.substitute = [&](const LatentFeature& g, const LatentFeature& s) { return fbs2d(g, s, mask); };
    hooks.region = mask;

    const auto z_T = standard_normal(z0.shape(), cfg.seed);
    report.output = sample_guided(z_T, grid, cfg, d, hooks, report);
    report.reconstruction = recon;
    report.timing.sampling_seconds = seconds_since(t0);
    report.denoiser_calls = d.call_counts() - before;
    check_accounting(cfg, report.denoiser_calls);
    return report;
}

RunReport run_fbsdiffpp(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d) {
    AdaptiveRun run(z0, cfg, d);
    run.run_inversion();
    const auto masks = adaptive_masks(cfg, z0.shape());
    SamplingHooks hooks;
    hooks.guide = [&](std::size_t idx) { return run.trajectory.at(idx); };
    hooks.substitute = [&](const LatentFeature& g, const LatentFeature& s) { return adafbs(g, s, masks); };
    hooks.region = adaptive_region(masks);
    return run.finish(std::move(hooks));
}

RunReport run_localized(const LatentFeature& z0, const FeatureMask& pixel_mask,
                        const PipelineConfig& cfg, Denoiser& d) {
    AdaptiveRun run(z0, cfg, d);
    const auto feature_mask = downsample_mask(pixel_mask, z0.height(), z0.width());
    run.run_inversion();
    const auto masks = adaptive_masks(cfg, z0.shape());
    SamplingHooks hooks;
    hooks.guide = [&](std::size_t idx) { return run.trajectory.at(idx); };
    hooks.substitute = [&](const LatentFeature& g, const LatentFeature& s) { return adafbs(g, s, masks); };
    hooks.region = adaptive_region(masks);
    // Index 0 of the trajectory is z0 itself, so the final blend restores the
    // source exactly outside the mask.
    hooks.calibrate = [&](std::size_t idx, const LatentFeature& s) {
        return blend_masked(s, run.trajectory.at(idx), feature_mask);
    };
    return run.finish(std::move(hooks));
}

RunReport run_style_specific(const LatentFeature& z0, const PipelineConfig& cfg, Denoiser& d) {
    if (!cfg.stp_enabled) throw ConfigError("style-specific creation needs stp_enabled");
    if (cfg.band.mode != BandMode::low) {
        throw ConfigError("style-specific creation is defined for low-band substitution only");
    }
    AdaptiveRun run(z0, cfg, d);
    const auto params = cfg.stp_params ? *cfg.stp_params : stp_sample(z0.height(), z0.width(), cfg.stp_seed);
    stp_validate(params, z0.height(), z0.width());
    run.report.stp_params = params;
    run.run_inversion();
    const auto masks = adaptive_masks(cfg, z0.shape());
    SamplingHooks hooks;
    hooks.guide = [&](std::size_t idx) {
        run.report.stp_applied.push_back(params);
        return stp_apply(run.trajectory.at(idx), params, cfg.stp_resize);
    };
    hooks.substitute = [&](const LatentFeature& g, const LatentFeature& s) { return adafbs(g, s, masks); };
    hooks.region = adaptive_region(masks);
    return run.finish(std::move(hooks));
}

}  // namespace fbs
