// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Toy fixtures shared by the pipeline tests and the acceptance suite.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>

#include "fbs/denoiser.hpp"
#include "fbs/diffusion.hpp"
#include "fbs/pipeline.hpp"
#include "fbs/rng.hpp"
#include "fbs/tensor.hpp"

namespace harness {

using namespace fbs;

// A smooth, non-constant prior mean: the null-text "source" distribution.
inline LatentFeature source_mean(const Shape& s) {
    std::vector<double> v(s.numel());
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t i = 0; i < s.height; ++i)
            for (std::size_t j = 0; j < s.width; ++j)
                v[(c * s.height + i) * s.width + j] =
                    0.5 * std::cos(0.7 * i + 0.3 * c) - 0.25 * std::sin(0.45 * j);
    return LatentFeature(s, std::move(v));
}

// Null-text prior N(source_mean, 1), target-text prior N(0, 0.25).
inline std::unique_ptr<AnalyticGaussianDenoiser> toy_denoiser(const Shape& s, const Schedule& schedule) {
    return std::make_unique<AnalyticGaussianDenoiser>(schedule, GaussianPrior{source_mean(s), 1.0},
                                                      GaussianPrior{LatentFeature::zeros(s), 0.25});
}

inline std::unique_ptr<AnalyticGaussianDenoiser> toy_denoiser(const Shape& s) {
    return toy_denoiser(s, Schedule::linear(1000, 50, 1e-4, 0.02));
}

// A source latent drawn from the null-text prior.
inline LatentFeature toy_source(const Shape& s, std::uint64_t seed) {
    const auto noise = standard_normal(s, seed);
    const auto mu = source_mean(s);
    std::vector<double> v(s.numel());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = mu[k] + noise[k];
    return LatentFeature(s, std::move(v));
}

// One CFG sampling step from grid index i to i - 1.
inline LatentFeature sample_from(const LatentFeature& z, std::size_t i, const Schedule& grid, double omega,
                                 Denoiser& d) {
    const auto tau = grid.grid();
    const auto ec = d.predict(z, tau[i], CondId::target_text);
    const auto eu = d.predict(z, tau[i], CondId::null_text);
    return ddim_sample_step(z, tau[i], tau[i - 1], cfg_eps(ec, eu, omega), grid);
}

// Null-text DDIM inversion over `grid` followed by null-text DDIM sampling
// back to t = 0; returns ||z0' - z0|| / ||z0||. Inversion queries the
// predictor at the destination timestep, as the pipelines do.
inline double reconstruction_error(const LatentFeature& z0, Denoiser& d, const Schedule& grid) {
    const auto tau = grid.grid();
    LatentFeature z = z0;
    for (std::size_t i = 0; i + 1 < tau.size(); ++i)
        z = ddim_invert_step(z, tau[i], tau[i + 1], d.predict(z, tau[i + 1], CondId::null_text), grid);
    for (std::size_t i = tau.size() - 1; i >= 1; --i)
        z = ddim_sample_step(z, tau[i], tau[i - 1], d.predict(z, tau[i], CondId::null_text), grid);
    return relative_l2(z, z0);
}

// Text-guided CFG sampling alone, from the same start noise the pipelines draw.
inline LatentFeature plain_sampling(const Shape& s, const PipelineConfig& cfg, Denoiser& d) {
    const auto grid = cfg.schedule(cfg.steps);
    const auto tau = grid.grid();
    auto z = standard_normal(s, cfg.seed);
    for (std::size_t i = tau.size() - 1; i >= 1; --i) z = sample_from(z, i, grid, cfg.omega, d);
    return z;
}

}  // namespace harness
