// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/config_json.hpp"

#include <initializer_list>
#include <string>

#include "fbs/errors.hpp"

namespace fbs {
namespace {

using nlohmann::json;

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, const char* what, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + what);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string read_string(const json& j, const char* key, std::string fallback) {
    read(j, key, fallback);
    return fallback;
}

}  // namespace

json to_json(const BandSpec& b) {
    return {{"mode", to_string(b.mode)},  {"units", to_string(b.units)},
            {"low_pass", b.low_pass},     {"high_pass", b.high_pass},
            {"mid_lower", b.mid_lower},   {"mid_upper", b.mid_upper}};
}

json to_json(const BandPartition& p) {
    return {{"units", to_string(p.units)}, {"lower", p.lower}, {"upper", p.upper}};
}

json to_json(const SpatialTransformParams& p) {
    return {{"rotation_degrees", p.rotation_degrees()},
            {"hflip", p.hflip},
            {"vflip", p.vflip},
            {"crop_top", p.crop_top},
            {"crop_left", p.crop_left},
            {"crop_h", p.crop_h},
            {"crop_w", p.crop_w}};
}

json to_json(const PipelineConfig& cfg) {
    json stp = {{"enabled", cfg.stp_enabled},
                {"seed", cfg.stp_seed},
                {"resize", to_string(cfg.stp_resize)},
                {"params", cfg.stp_params ? to_json(*cfg.stp_params) : json(nullptr)}};
    json schedule = {{"n_train", cfg.n_train}, {"beta_start", cfg.beta_start}, {"beta_end", cfg.beta_end}};
    if (!cfg.alpha_bar.empty()) schedule["alpha_bar"] = cfg.alpha_bar;
    return {{"variant", to_string(cfg.variant)},
            {"band", to_json(cfg.band)},
            {"steps", cfg.steps},
            {"inversion_steps", cfg.inversion_steps},
            {"lambda", cfg.lambda},
            {"switch_step", cfg.switch_step()},
            {"omega", cfg.omega},
            {"seed", cfg.seed},
            {"substitution", to_string(cfg.substitution)},
            {"stp", stp},
            {"schedule", schedule},
            {"report_partition", to_json(cfg.report_partition)},
            {"spill_dir", cfg.spill_dir ? json(cfg.spill_dir->string()) : json(nullptr)}};
}

json to_json(const BandEnergies& e) {
    return {{"low", e.low}, {"mid", e.mid}, {"high", e.high}};
}

json to_json(const CallCounts& c) {
    return {{"null_text", c.null_text}, {"target_text", c.target_text}, {"total", c.total()}};
}

SpatialTransformParams stp_params_from_json(const json& j) {
    require_object(j, "stp.params");
    reject_unknown(j, "stp.params",
                   {"rotation_degrees", "hflip", "vflip", "crop_top", "crop_left", "crop_h", "crop_w"});
    SpatialTransformParams p;
    int degrees = 0;
    read(j, "rotation_degrees", degrees);
    if (degrees % 90 != 0 || degrees < 0 || degrees > 270) {
        throw ConfigError("rotation_degrees must be one of 0, 90, 180, 270");
    }
    p.quarter_turns = degrees / 90;
    read(j, "hflip", p.hflip);
    read(j, "vflip", p.vflip);
    for (const char* key : {"crop_top", "crop_left", "crop_h", "crop_w"}) {
        if (!j.contains(key)) throw ConfigError(std::string("stp.params needs '") + key + "'");
    }
    read(j, "crop_top", p.crop_top);
    read(j, "crop_left", p.crop_left);
    read(j, "crop_h", p.crop_h);
    read(j, "crop_w", p.crop_w);
    return p;
}

PipelineConfig config_from_json(const json& in) {
    require_object(in, "config");
    if (in.contains("config") && in.at("config").is_object()) return config_from_json(in.at("config"));
    reject_unknown(in, "config",
                   {"variant", "band", "steps", "inversion_steps", "lambda", "switch_step", "omega", "seed",
                    "substitution", "stp", "schedule", "report_partition", "spill_dir"});

    const auto variant = parse_variant(read_string(in, "variant", "fbsdiffpp"));
    BandMode mode = BandMode::low;
    if (in.contains("band")) {
        require_object(in.at("band"), "band");
        mode = parse_band_mode(read_string(in.at("band"), "mode", "low"));
    }
    auto cfg = variant == Variant::fbsdiff ? PipelineConfig::fbsdiff_defaults(mode)
                                           : PipelineConfig::fbsdiffpp_defaults(mode);

    if (in.contains("band")) {
        const auto& b = in.at("band");
        reject_unknown(b, "band", {"mode", "units", "low_pass", "high_pass", "mid_lower", "mid_upper"});
        if (b.contains("units")) {
            const auto units = parse_threshold_units(b.at("units").get<std::string>());
            if (units != cfg.band.units) {
                cfg.band = units == ThresholdUnits::percentile ? BandSpec::percentile_defaults(mode)
                                                               : BandSpec::coordinate_defaults(mode);
            }
        }
        read(b, "low_pass", cfg.band.low_pass);
        read(b, "high_pass", cfg.band.high_pass);
        read(b, "mid_lower", cfg.band.mid_lower);
        read(b, "mid_upper", cfg.band.mid_upper);
    }
    read(in, "steps", cfg.steps);
    read(in, "inversion_steps", cfg.inversion_steps);
    read(in, "lambda", cfg.lambda);
    read(in, "omega", cfg.omega);
    read(in, "seed", cfg.seed);
    if (in.contains("substitution")) {
        cfg.substitution = parse_substitution_style(read_string(in, "substitution", ""));
    }
    if (in.contains("stp")) {
        const auto& s = in.at("stp");
        require_object(s, "stp");
        reject_unknown(s, "stp", {"enabled", "seed", "resize", "params"});
        read(s, "enabled", cfg.stp_enabled);
        read(s, "seed", cfg.stp_seed);
        if (s.contains("resize")) cfg.stp_resize = parse_resize_kernel(read_string(s, "resize", ""));
        if (s.contains("params") && !s.at("params").is_null()) {
            cfg.stp_params = stp_params_from_json(s.at("params"));
        }
    }
    if (in.contains("schedule")) {
        const auto& s = in.at("schedule");
        require_object(s, "schedule");
        reject_unknown(s, "schedule", {"n_train", "beta_start", "beta_end", "alpha_bar"});
        read(s, "n_train", cfg.n_train);
        read(s, "beta_start", cfg.beta_start);
        read(s, "beta_end", cfg.beta_end);
        read(s, "alpha_bar", cfg.alpha_bar);
    }
    if (in.contains("report_partition")) {
        const auto& p = in.at("report_partition");
        require_object(p, "report_partition");
        reject_unknown(p, "report_partition", {"units", "lower", "upper"});
        if (p.contains("units")) cfg.report_partition.units = parse_threshold_units(read_string(p, "units", ""));
        read(p, "lower", cfg.report_partition.lower);
        read(p, "upper", cfg.report_partition.upper);
    }
    if (in.contains("spill_dir") && !in.at("spill_dir").is_null()) {
        cfg.spill_dir = std::filesystem::path(read_string(in, "spill_dir", ""));
    }
    return cfg;
}

}  // namespace fbs
