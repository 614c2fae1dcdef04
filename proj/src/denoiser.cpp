// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/denoiser.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fbs/errors.hpp"

namespace fbs {

std::string_view to_string(CondId c) {
    return c == CondId::null_text ? "null_text" : "target_text";
}

CondId parse_cond_id(std::string_view s) {
    if (s == "null_text") return CondId::null_text;
    if (s == "target_text") return CondId::target_text;
    throw InvalidArgument("unknown conditioning id '" + std::string(s) + "'");
}

LatentFeature Denoiser::predict(const LatentFeature& z_t, Timestep t, CondId cond) {
    ++counts_[cond];
    auto eps = do_predict(z_t, t, cond);
    if (eps.shape() != z_t.shape()) {
        throw ShapeError("denoiser returned " + to_string(eps.shape()) + " for input " +
                         to_string(z_t.shape()));
    }
    return eps;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(Schedule schedule, GaussianPrior null_prior,
                                                   GaussianPrior target_prior)
    : schedule_(std::move(schedule)), null_(std::move(null_prior)), target_(std::move(target_prior)) {
    for (const auto* p : {&null_, &target_}) {
        if (!(p->variance >= 0.0) || !std::isfinite(p->variance)) {
            throw InvalidArgument("Gaussian prior variance must be finite and >= 0");
        }
    }
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(Schedule schedule, GaussianPrior prior)
    : AnalyticGaussianDenoiser(std::move(schedule), prior, prior) {}

LatentFeature AnalyticGaussianDenoiser::do_predict(const LatentFeature& z_t, Timestep t,
                                                   CondId cond) {
    if (t == 0) throw InvalidArgument("analytic denoiser is undefined at t = 0");
    const auto& p = prior(cond);
    require_same_shape(z_t, p.mean, "analytic_predict");
    const double abar = schedule_.alpha_bar(t);
    const double sa = std::sqrt(abar);
    const double s1 = std::sqrt(1.0 - abar);
    const double denom = abar * p.variance + (1.0 - abar);
    std::vector<double> eps(z_t.size());
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double m = (sa * p.variance * z_t[k] + (1.0 - abar) * p.mean[k]) / denom;
        eps[k] = (z_t[k] - sa * m) / s1;
    }
    return LatentFeature(z_t.shape(), std::move(eps));
}

}  // namespace fbs
