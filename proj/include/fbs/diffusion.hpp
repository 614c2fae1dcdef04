// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fbs/tensor.hpp"

namespace fbs {

using Timestep = std::size_t;

/// Cumulative noise schedule plus the sub-sampled timestep grid.
///
/// alpha_bar(0) is 1 by definition; alpha_bar(t) for t in 1..n_train is the
/// running product of (1 - beta_i). The grid tau has T + 1 entries with
/// tau[0] = 0 and tau[T] = n_train.
class Schedule {
public:
    /// Linear betas from beta_start to beta_end over n_train steps, uniform
    /// grid tau_i = round_half_up(i * n_train / T).
    static Schedule linear(std::size_t n_train, std::size_t steps, double beta_start,
                           double beta_end);

    /// Adopts an externally supplied table (e.g. from a bridge handshake).
    /// `alpha_bar` holds entries for t = 1..n_train.
    static Schedule from_alpha_bar(std::vector<double> alpha_bar, std::size_t steps);

    /// Same alpha_bar table, different grid.
    Schedule with_steps(std::size_t steps) const;

    std::size_t n_train() const noexcept { return alpha_bar_.size() - 1; }
    std::size_t steps() const noexcept { return tau_.size() - 1; }
    double alpha_bar(Timestep t) const;
    /// Full table indexed 0..n_train.
    std::span<const double> alpha_bar_table() const noexcept { return alpha_bar_; }
    std::span<const Timestep> grid() const noexcept { return tau_; }
    Timestep grid_at(std::size_t i) const { return tau_.at(i); }

private:
    Schedule(std::vector<double> alpha_bar_with_zero, std::size_t steps);

    std::vector<double> alpha_bar_;
    std::vector<Timestep> tau_;
};

/// Uniform-stride grid over [0, n_train] with T intervals.
std::vector<Timestep> uniform_grid(std::size_t n_train, std::size_t steps);

/// x0 estimate (z_t - sqrt(1 - abar_t) eps) / sqrt(abar_t). Requires t >= 1.
LatentFeature predict_x0(const LatentFeature& z_t, const LatentFeature& eps, Timestep t,
                         const Schedule& s);

/// Deterministic DDIM move toward more noise:
/// sqrt(abar_to) * x0 + sqrt(1 - abar_to) * eps, with x0 = z itself at t_from = 0.
LatentFeature ddim_invert_step(const LatentFeature& z_t, Timestep t_from, Timestep t_to,
                               const LatentFeature& eps, const Schedule& s);

/// Deterministic DDIM move toward less noise (same formula, t_to < t_from).
LatentFeature ddim_sample_step(const LatentFeature& z_t, Timestep t_from, Timestep t_to,
                               const LatentFeature& eps, const Schedule& s);

/// Classifier-free guidance: omega * eps_cond + (1 - omega) * eps_uncond.
LatentFeature cfg_eps(const LatentFeature& eps_cond, const LatentFeature& eps_uncond,
                      double omega);

}  // namespace fbs
