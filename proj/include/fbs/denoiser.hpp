// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "fbs/diffusion.hpp"
#include "fbs/tensor.hpp"

namespace fbs {

/// Conditioning a noise prediction is made under. Inversion and guiding
/// trajectories use null_text; the sampling trajectory mixes both via CFG.
enum class CondId { null_text, target_text };

std::string_view to_string(CondId c);
CondId parse_cond_id(std::string_view s);

struct CallCounts {
    std::uint64_t null_text = 0;
    std::uint64_t target_text = 0;

    std::uint64_t total() const noexcept { return null_text + target_text; }
    std::uint64_t& operator[](CondId c) noexcept {
        return c == CondId::null_text ? null_text : target_text;
    }

    friend CallCounts operator-(const CallCounts& a, const CallCounts& b) {
        return {a.null_text - b.null_text, a.target_text - b.target_text};
    }
    friend bool operator==(const CallCounts&, const CallCounts&) = default;
};

/// Noise predictor eps(z_t, t, cond).
///
/// `predict` counts every request per conditioning and checks that the
/// implementation returned a tensor of the input's shape. Implementations
/// must be deterministic. One instance serves one trajectory at a time; it
/// may be handed between threads but not called concurrently.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    LatentFeature predict(const LatentFeature& z_t, Timestep t, CondId cond);
    const CallCounts& call_counts() const noexcept { return counts_; }

protected:
    virtual LatentFeature do_predict(const LatentFeature& z_t, Timestep t, CondId cond) = 0;

private:
    CallCounts counts_;
};

struct GaussianPrior {
    LatentFeature mean;
    double variance = 1.0;
};

/// Exact eps-predictor for data x0 ~ N(mean, variance * I), one prior per
/// conditioning id.
///
/// With abar = abar_t the posterior mean of x0 given z_t is
///   m = (sqrt(abar) * var * z_t + (1 - abar) * mean) / (abar * var + 1 - abar)
/// and the returned noise is (z_t - sqrt(abar) * m) / sqrt(1 - abar).
/// For var = 0 the x0 estimate is `mean` at every t.
class AnalyticGaussianDenoiser final : public Denoiser {
public:
    AnalyticGaussianDenoiser(Schedule schedule, GaussianPrior null_prior, GaussianPrior target_prior);
    AnalyticGaussianDenoiser(Schedule schedule, GaussianPrior prior);

    const GaussianPrior& prior(CondId c) const noexcept {
        return c == CondId::null_text ? null_ : target_;
    }

protected:
    LatentFeature do_predict(const LatentFeature& z_t, Timestep t, CondId cond) override;

private:
    Schedule schedule_;
    GaussianPrior null_;
    GaussianPrior target_;
};

}  // namespace fbs
