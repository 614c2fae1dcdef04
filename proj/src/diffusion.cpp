// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/diffusion.hpp"

#include <cmath>
#include <string>

#include "fbs/errors.hpp"

namespace fbs {
namespace {

LatentFeature renoise(const LatentFeature& x0, const LatentFeature& eps, double abar_to) {
    const double a = std::sqrt(abar_to);
    const double b = std::sqrt(1.0 - abar_to);
    std::vector<double> out(x0.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * x0[k] + b * eps[k];
    return LatentFeature(x0.shape(), std::move(out));
}

}  // namespace

std::vector<Timestep> uniform_grid(std::size_t n_train, std::size_t steps) {
    if (steps < 1 || steps > n_train) {
        throw InvalidArgument("grid needs 1 <= T <= n_train (T = " + std::to_string(steps) +
                              ", n_train = " + std::to_string(n_train) + ")");
    }
    std::vector<Timestep> tau(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) tau[i] = (2 * i * n_train + steps) / (2 * steps);
    return tau;
}

Schedule::Schedule(std::vector<double> alpha_bar_with_zero, std::size_t steps)
    : alpha_bar_(std::move(alpha_bar_with_zero)) {
    tau_ = uniform_grid(n_train(), steps);
}

Schedule Schedule::linear(std::size_t n_train, std::size_t steps, double beta_start,
                          double beta_end) {
    if (n_train < 1) throw InvalidArgument("n_train must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw InvalidArgument("beta range must satisfy 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> abar(n_train + 1);
    abar[0] = 1.0;
    double prod = 1.0;
    for (std::size_t t = 1; t <= n_train; ++t) {
        const double frac = n_train == 1 ? 0.0
                                         : static_cast<double>(t - 1) /
                                               static_cast<double>(n_train - 1);
        const double beta = beta_start + (beta_end - beta_start) * frac;
        prod *= 1.0 - beta;
        abar[t] = prod;
    }
    return Schedule(std::move(abar), steps);
}

Schedule Schedule::from_alpha_bar(std::vector<double> alpha_bar, std::size_t steps) {
    if (alpha_bar.empty()) throw InvalidArgument("empty alpha_bar table");
    double prev = 1.0;
    for (std::size_t t = 0; t < alpha_bar.size(); ++t) {
        const double a = alpha_bar[t];
        if (!(a > 0.0 && a < prev)) {
            throw InvalidArgument("alpha_bar must lie in (0, 1) and strictly decrease (index " +
                                  std::to_string(t + 1) + ")");
        }
        prev = a;
    }
    std::vector<double> abar;
    abar.reserve(alpha_bar.size() + 1);
    abar.push_back(1.0);
    abar.insert(abar.end(), alpha_bar.begin(), alpha_bar.end());
    return Schedule(std::move(abar), steps);
}

Schedule Schedule::with_steps(std::size_t steps) const { return Schedule(alpha_bar_, steps); }

double Schedule::alpha_bar(Timestep t) const {
    if (t >= alpha_bar_.size()) {
        throw InvalidArgument("timestep " + std::to_string(t) + " beyond schedule length " +
                              std::to_string(n_train()));
    }
    return alpha_bar_[t];
}

LatentFeature predict_x0(const LatentFeature& z_t, const LatentFeature& eps, Timestep t,
                         const Schedule& s) {
    require_same_shape(z_t, eps, "predict_x0");
    if (t == 0) throw InvalidArgument("predict_x0 is undefined at t = 0 (alpha_bar = 1)");
    const double abar = s.alpha_bar(t);
    const double a = std::sqrt(abar);
    const double b = std::sqrt(1.0 - abar);
    std::vector<double> out(z_t.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (z_t[k] - b * eps[k]) / a;
    return LatentFeature(z_t.shape(), std::move(out));
}

LatentFeature ddim_invert_step(const LatentFeature& z_t, Timestep t_from, Timestep t_to,
                               const LatentFeature& eps, const Schedule& s) {
    require_same_shape(z_t, eps, "ddim_invert_step");
    if (!(t_to > t_from)) {
        throw InvalidArgument("inversion step must increase the timestep (" +
                              std::to_string(t_from) + " -> " + std::to_string(t_to) + ")");
    }
    if (t_from == 0) return renoise(z_t, eps, s.alpha_bar(t_to));
    return renoise(predict_x0(z_t, eps, t_from, s), eps, s.alpha_bar(t_to));
}

LatentFeature ddim_sample_step(const LatentFeature& z_t, Timestep t_from, Timestep t_to,
                               const LatentFeature& eps, const Schedule& s) {
    require_same_shape(z_t, eps, "ddim_sample_step");
    if (!(t_to < t_from)) {
        throw InvalidArgument("sampling step must decrease the timestep (" +
                              std::to_string(t_from) + " -> " + std::to_string(t_to) + ")");
    }
    auto x0 = predict_x0(z_t, eps, t_from, s);
    if (t_to == 0) return x0;
    return renoise(x0, eps, s.alpha_bar(t_to));
}

LatentFeature cfg_eps(const LatentFeature& eps_cond, const LatentFeature& eps_uncond,
                      double omega) {
    require_same_shape(eps_cond, eps_uncond, "cfg_eps");
    std::vector<double> out(eps_cond.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = omega * eps_cond[k] + (1.0 - omega) * eps_uncond[k];
    }
    return LatentFeature(eps_cond.shape(), std::move(out));
}

}  // namespace fbs
