// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fbs/band_energy.hpp"
#include "fbs/bridge.hpp"
#include "fbs/config_json.hpp"
#include "fbs/errors.hpp"
#include "fbs/pipeline.hpp"
#include "fbs/tensor_io.hpp"

namespace fbs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kBridgeEnv = "FBS_BRIDGE_ADDR";

// Flags shared by run and sweep. Anything left unset falls back to the
// config file, then to the variant's defaults.
struct PipelineFlags {
    std::string config_path;
    std::string input;
    std::string mask;
    std::string output_dir;

    std::optional<std::string> variant, mode, substitution, stp_resize, spill_dir;
    std::optional<double> th_lp, th_hp, th_mp1, th_mp2;
    std::optional<double> pt_lp, pt_hp, pt_mp1, pt_mp2;
    std::optional<double> lambda, omega, beta_start, beta_end;
    std::optional<std::size_t> steps, inversion_steps, n_train;
    std::optional<std::uint64_t> seed, stp_seed;
    bool stp = false;

    std::optional<std::string> denoiser;
    std::optional<std::string> null_mean, target_mean;
    std::optional<double> null_variance, target_variance;
    bool adopt_bridge_schedule = false;
    std::string bridge_transcript;
    int bridge_retries = 0;
};

void add_pipeline_flags(CLI::App& app, PipelineFlags& f) {
    app.add_option("--config", f.config_path, "JSON config or run manifest; flags override it");
    app.add_option("--input", f.input, "source latent z0 (tensor file)");
    app.add_option("--mask", f.mask, "1 x H x W binary pixel mask: localized manipulation");
    app.add_option("--variant", f.variant, "fbsdiff | fbsdiffpp");
    app.add_option("--mode", f.mode, "low | mid | high");
    app.add_option("--th-lp", f.th_lp, "2D low-pass threshold (i + j)");
    app.add_option("--th-hp", f.th_hp, "2D high-pass threshold");
    app.add_option("--th-mp1", f.th_mp1, "2D mid-band lower threshold");
    app.add_option("--th-mp2", f.th_mp2, "2D mid-band upper threshold");
    app.add_option("--pt-lp", f.pt_lp, "low-pass percentile");
    app.add_option("--pt-hp", f.pt_hp, "high-pass percentile");
    app.add_option("--pt-mp1", f.pt_mp1, "mid-band lower percentile");
    app.add_option("--pt-mp2", f.pt_mp2, "mid-band upper percentile");
    app.add_option("--steps", f.steps, "sampling steps T");
    app.add_option("--inversion-steps", f.inversion_steps, "FBSDiff inversion steps T_inv");
    app.add_option("--lambda", f.lambda, "fraction of steps with substitution");
    app.add_option("--omega", f.omega, "classifier-free guidance scale");
    app.add_option("--seed", f.seed, "seed of the sampling start noise");
    app.add_option("--substitution", f.substitution, "per-step | once | full");
    app.add_flag("--stp", f.stp, "style-specific creation (spatial transformation pool)");
    app.add_option("--stp-seed", f.stp_seed, "seed for the STP draw");
    app.add_option("--stp-resize", f.stp_resize, "bilinear | nearest");
    app.add_option("--n-train", f.n_train, "training schedule length");
    app.add_option("--beta-start", f.beta_start);
    app.add_option("--beta-end", f.beta_end);
    app.add_option("--spill-dir", f.spill_dir, "keep the inversion trajectory on disk here");
    app.add_option("--denoiser", f.denoiser, "analytic | bridge (address from " + std::string(kBridgeEnv) + ")");
    app.add_option("--null-mean", f.null_mean, "analytic null-text prior mean: number or tensor file");
    app.add_option("--null-variance", f.null_variance, "analytic null-text prior variance");
    app.add_option("--target-mean", f.target_mean, "analytic target prior mean: number or tensor file");
    app.add_option("--target-variance", f.target_variance, "analytic target prior variance");
    app.add_flag("--adopt-bridge-schedule", f.adopt_bridge_schedule,
                 "use the alpha_bar table from the bridge handshake");
    app.add_option("--bridge-transcript", f.bridge_transcript, "record bridge frames to this file");
    app.add_option("--bridge-retries", f.bridge_retries, "extra connection attempts");
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw TensorFormatError(TensorFormatError::Kind::io, "cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string substitution_name(const std::string& flag) {
    if (flag == "per-step" || flag == "per_step") return "per_step";
    if (flag == "once") return "once";
    if (flag == "full" || flag == "full_spectrum") return "full_spectrum";
    throw ConfigError("unknown --substitution '" + flag + "' (expected per-step|once|full)");
}

// Everything a run needs, as merged JSON so it can be echoed verbatim.
struct Job {
    json config;
    json denoiser;
    std::string input;
    std::string mask;
};

Job merge(const PipelineFlags& f) {
    Job job{json::object(), json::object(), "", ""};
    if (!f.config_path.empty()) {
        auto file = read_json_file(f.config_path);
        if (!file.is_object()) throw ConfigError(f.config_path + ": expected a JSON object");
        if (file.contains("config")) {
            job.config = file.at("config");
            if (file.contains("denoiser")) job.denoiser = file.at("denoiser");
            if (file.contains("input") && file.at("input").is_string()) job.input = file.at("input");
            if (file.contains("mask") && file.at("mask").is_string()) job.mask = file.at("mask");
        } else {
            job.config = std::move(file);
        }
    }
    auto& c = job.config;
    // A derived value; recomputed from lambda and steps.
    c.erase("switch_step");

    if (f.variant) {
        const auto prev = c.value("variant", std::string("fbsdiffpp"));
        if (prev != *f.variant) c.erase("band");
        c["variant"] = *f.variant;
    }
    if (f.mode) {
        c["band"]["mode"] = *f.mode;
        for (const char* k : {"low_pass", "high_pass", "mid_lower", "mid_upper"}) c["band"].erase(k);
    }
    const bool any_th = f.th_lp || f.th_hp || f.th_mp1 || f.th_mp2;
    const bool any_pt = f.pt_lp || f.pt_hp || f.pt_mp1 || f.pt_mp2;
    if (any_th && any_pt) throw ConfigError("--th-* and --pt-* flags are mutually exclusive");
    if (any_th || any_pt) {
        const std::string units = any_th ? "coordinate_sum" : "percentile";
        auto& b = c["band"];
        if (b.value("units", units) != units) {
            for (const char* k : {"low_pass", "high_pass", "mid_lower", "mid_upper"}) b.erase(k);
        }
        b["units"] = units;
        const auto set = [&](const char* key, const std::optional<double>& th, const std::optional<double>& pt) {
            if (th) b[key] = *th;
            if (pt) b[key] = *pt;
        };
        set("low_pass", f.th_lp, f.pt_lp);
        set("high_pass", f.th_hp, f.pt_hp);
        set("mid_lower", f.th_mp1, f.pt_mp1);
        set("mid_upper", f.th_mp2, f.pt_mp2);
    }
    if (f.steps) c["steps"] = *f.steps;
    if (f.inversion_steps) c["inversion_steps"] = *f.inversion_steps;
    if (f.lambda) c["lambda"] = *f.lambda;
    if (f.omega) c["omega"] = *f.omega;
    if (f.seed) c["seed"] = *f.seed;
    if (f.substitution) c["substitution"] = substitution_name(*f.substitution);
    if (f.stp) c["stp"]["enabled"] = true;
    if (f.stp_seed) c["stp"]["seed"] = *f.stp_seed;
    if (f.stp_resize) c["stp"]["resize"] = *f.stp_resize;
    if (f.n_train) c["schedule"]["n_train"] = *f.n_train;
    if (f.beta_start) c["schedule"]["beta_start"] = *f.beta_start;
    if (f.beta_end) c["schedule"]["beta_end"] = *f.beta_end;
    if (f.spill_dir) c["spill_dir"] = *f.spill_dir;

    auto& d = job.denoiser;
    if (f.denoiser) {
        if (d.value("kind", std::string("analytic")) != *f.denoiser) d = json::object();
        d["kind"] = *f.denoiser;
    }
    if (!d.contains("kind")) d["kind"] = "analytic";
    const auto kind = d.at("kind").get<std::string>();
    if (kind == "analytic") {
        const auto mean_value = [](const std::string& s) -> json {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec == std::errc() && p == s.data() + s.size()) return v;
            return s;
        };
        if (!d.contains("null")) d["null"] = {{"mean", 0.0}, {"variance", 1.0}};
        if (!d.contains("target")) d["target"] = {{"mean", 0.0}, {"variance", 0.25}};
        if (f.null_mean) d["null"]["mean"] = mean_value(*f.null_mean);
        if (f.null_variance) d["null"]["variance"] = *f.null_variance;
        if (f.target_mean) d["target"]["mean"] = mean_value(*f.target_mean);
        if (f.target_variance) d["target"]["variance"] = *f.target_variance;
    } else if (kind == "bridge") {
        if (f.adopt_bridge_schedule) d["adopt_schedule"] = true;
        if (!d.contains("adopt_schedule")) d["adopt_schedule"] = false;
    } else {
        throw ConfigError("unknown --denoiser '" + kind + "' (expected analytic|bridge)");
    }

    if (!f.input.empty()) job.input = f.input;
    if (!f.mask.empty()) job.mask = f.mask;
    if (job.input.empty()) throw ConfigError("no input tensor (--input)");
    return job;
}

GaussianPrior prior_from_json(const json& j, const Shape& shape, const char* which) {
    if (!j.is_object() || !j.contains("mean")) {
        throw ConfigError(std::string("analytic denoiser needs ") + which + ".mean");
    }
    GaussianPrior p{LatentFeature::zeros(shape), j.value("variance", 1.0)};
    const auto& m = j.at("mean");
    if (m.is_number()) {
        p.mean = LatentFeature::filled(shape, m.get<double>());
    } else if (m.is_string()) {
        p.mean = load_tensor(m.get<std::string>());
        if (p.mean.shape() != shape) {
            throw ConfigError(std::string(which) + " prior mean has shape " + to_string(p.mean.shape()) +
                              ", input is " + to_string(shape));
        }
    } else {
        throw ConfigError(std::string(which) + ".mean must be a number or a tensor path");
    }
    if (!(p.variance >= 0.0)) throw ConfigError(std::string(which) + ".variance must be >= 0");
    return p;
}

// Owns the denoiser and, for the bridge, its connection.
struct DenoiserHandle {
    std::unique_ptr<bridge::BridgeClient> client;
    std::unique_ptr<Denoiser> denoiser;

    DenoiserHandle() = default;
    DenoiserHandle(DenoiserHandle&&) = default;
    ~DenoiserHandle() {
        if (!client) return;
        try {
            client->shutdown();
        } catch (const std::exception&) {
            // The run's outcome is already decided.
        }
    }
};

std::unique_ptr<bridge::Stream> connect_with_retries(const std::string& address, int retries) {
    for (int attempt = 0;; ++attempt) {
        try {
            return bridge::connect(address);
        } catch (const TransportError&) {
            if (attempt >= retries) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(200 << std::min(attempt, 4)));
        }
    }
}

// Connects and handshakes; may replace cfg's schedule with the bridge's.
DenoiserHandle make_denoiser(const json& spec, PipelineConfig& cfg, const Shape& shape,
                             const PipelineFlags& flags) {
    DenoiserHandle h;
    const auto kind = spec.at("kind").get<std::string>();
    if (kind == "analytic") {
        h.denoiser = std::make_unique<AnalyticGaussianDenoiser>(
            cfg.schedule(cfg.steps), prior_from_json(spec.at("null"), shape, "null"),
            prior_from_json(spec.at("target"), shape, "target"));
        return h;
    }
    const char* address = std::getenv(kBridgeEnv);
    if (address == nullptr || *address == '\0') {
        throw ConfigError(std::string("--denoiser bridge needs ") + kBridgeEnv);
    }
    h.client = std::make_unique<bridge::BridgeClient>(connect_with_retries(address, flags.bridge_retries));
    if (!flags.bridge_transcript.empty()) h.client->record_transcript(flags.bridge_transcript);
    auto info = h.client->handshake(shape, cfg.n_train);
    if (spec.value("adopt_schedule", false)) cfg.alpha_bar = std::move(info.alpha_bar);
    h.denoiser = std::make_unique<bridge::BridgeDenoiser>(*h.client);
    return h;
}

enum class Task { translate, localized, style };

const char* task_name(Task t) {
    switch (t) {
        case Task::translate: return "translate";
        case Task::localized: return "localized";
        case Task::style: return "style";
    }
    return "?";
}

Task task_of(const PipelineConfig& cfg, const Job& job) {
    if (!job.mask.empty() && cfg.stp_enabled) {
        throw ConfigError("--mask and --stp select different tasks; pick one");
    }
    if (!job.mask.empty()) return Task::localized;
    if (cfg.stp_enabled) return Task::style;
    return Task::translate;
}

RunReport execute(Task task, const LatentFeature& z0, const std::optional<FeatureMask>& mask,
                  const PipelineConfig& cfg, Denoiser& d) {
    if (task != Task::translate && cfg.variant != Variant::fbsdiffpp) {
        throw ConfigError(std::string(task_name(task)) + " runs need variant fbsdiffpp");
    }
    switch (task) {
        case Task::localized: return run_localized(z0, *mask, cfg, d);
        case Task::style: return run_style_specific(z0, cfg, d);
        case Task::translate: break;
    }
    return cfg.variant == Variant::fbsdiff ? run_fbsdiff(z0, cfg, d) : run_fbsdiffpp(z0, cfg, d);
}

std::optional<FeatureMask> load_mask(const Job& job) {
    if (job.mask.empty()) return std::nullopt;
    try {
        return FeatureMask::from_tensor(load_tensor(job.mask));
    } catch (const InvalidArgument& e) {
        throw ConfigError(job.mask + ": " + e.what());
    }
}

json trace_json(const RunReport& r) {
    json rows = json::array();
    for (const auto& row : r.trace) {
        rows.push_back({{"step", row.step},
                        {"timestep", row.timestep},
                        {"substituted", row.substituted},
                        {"energy", to_json(row.sample)},
                        {"region_energy_sample", row.region_sample},
                        {"region_energy_guide", row.region_guide}});
    }
    return rows;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw TensorFormatError(TensorFormatError::Kind::io, "cannot write " + tmp.string());
        os << text;
        if (!os) throw TensorFormatError(TensorFormatError::Kind::io, "write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void make_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw TensorFormatError(TensorFormatError::Kind::io, "cannot create " + dir + ": " + ec.message());
}

int cmd_run(const PipelineFlags& flags, std::ostream& out) {
    auto job = merge(flags);
    auto cfg = config_from_json(job.config);
    const auto task = task_of(cfg, job);
    const auto z0 = load_tensor(job.input);
    const auto mask = load_mask(job);
    auto handle = make_denoiser(job.denoiser, cfg, z0.shape(), flags);

    const auto t0 = std::chrono::steady_clock::now();
    const auto report = execute(task, z0, mask, cfg, *handle.denoiser);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    make_output_dir(flags.output_dir);
    const auto output_path = (fs::path(flags.output_dir) / "output.fbst").string();
    save_tensor(report.output, output_path);

    json manifest = {
        {"command", "run"},
        {"task", task_name(task)},
        {"input", job.input},
        {"mask", job.mask.empty() ? json(nullptr) : json(job.mask)},
        {"output", output_path},
        {"shape", {z0.channels(), z0.height(), z0.width()}},
        {"config", to_json(cfg)},
        {"denoiser", job.denoiser},
        {"denoiser_calls", to_json(report.denoiser_calls)},
        {"switch_step", report.switch_step},
        {"stp_params", report.stp_params ? to_json(*report.stp_params) : json(nullptr)},
        {"trace", trace_json(report)},
        {"timing",
         {{"inversion_seconds", report.timing.inversion_seconds},
          {"sampling_seconds", report.timing.sampling_seconds},
          {"total_seconds", total}}},
    };
    const auto manifest_path = fs::path(flags.output_dir) / "manifest.json";
    write_text_atomic(manifest_path, manifest.dump(2) + "\n");
    out << "wrote " << output_path << " (" << report.denoiser_calls.total() << " denoiser calls)\n";
    return kOk;
}

// Spectral regions a sweep correlates over, in percentile units:
// low band r <= low_cut, high band r > high_cut.
struct SweepBands {
    double low_cut = 50.0;
    double high_cut = 7.0;
};

FeatureMask radius_region(std::size_t h, std::size_t w, double cut, bool inside) {
    const BandPartition p{ThresholdUnits::percentile, cut, 100.0};
    auto region = band_region(p, Band::low, h, w);
    return inside ? region : region.complement();
}

void apply_sweep_value(PipelineConfig& cfg, const std::string& param, double v) {
    const auto need = [&](ThresholdUnits u) {
        if (cfg.band.units != u) {
            throw ConfigError("--param " + param + " needs " + std::string(to_string(u)) + " band thresholds");
        }
    };
    if (param == "pt_lp" || param == "pt_hp" || param == "pt_mp1" || param == "pt_mp2") {
        need(ThresholdUnits::percentile);
    } else if (param == "th_lp" || param == "th_hp" || param == "th_mp1" || param == "th_mp2") {
        need(ThresholdUnits::coordinate_sum);
    }
    if (param == "pt_lp" || param == "th_lp") {
        cfg.band.low_pass = v;
    } else if (param == "pt_hp" || param == "th_hp") {
        cfg.band.high_pass = v;
    } else if (param == "pt_mp1" || param == "th_mp1") {
        cfg.band.mid_lower = v;
    } else if (param == "pt_mp2" || param == "th_mp2") {
        cfg.band.mid_upper = v;
    } else if (param == "lambda") {
        cfg.lambda = v;
    } else if (param == "omega") {
        cfg.omega = v;
    } else {
        throw ConfigError("unknown sweep parameter '" + param + "'");
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct SweepFlags {
    std::string param = "pt_lp";
    std::string values_text;
    std::vector<double> values;
    int jobs = 1;
    SweepBands bands;
};

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        double v = 0.0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size()) {
            throw ConfigError("--values: '" + item + "' is not a number");
        }
        values.push_back(v);
    }
    return values;
}

int cmd_sweep(const PipelineFlags& flags, SweepFlags sweep, std::ostream& out) {
    sweep.values = parse_values(sweep.values_text);
    if (sweep.values.empty()) throw ConfigError("sweep needs a non-empty --values list");
    if (sweep.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (!(sweep.bands.low_cut >= 0.0 && sweep.bands.low_cut <= 100.0 && sweep.bands.high_cut >= 0.0 &&
          sweep.bands.high_cut <= 100.0)) {
        throw ConfigError("correlation band cuts must lie in [0, 100]");
    }
    const auto job = merge(flags);
    const auto base = config_from_json(job.config);
    const auto task = task_of(base, job);
    const auto z0 = load_tensor(job.input);
    const auto mask = load_mask(job);

    std::vector<PipelineConfig> cfgs;
    for (double v : sweep.values) {
        auto cfg = base;
        apply_sweep_value(cfg, sweep.param, v);
        cfg.validate();
        cfgs.push_back(std::move(cfg));
    }
    const auto low_region = radius_region(z0.height(), z0.width(), sweep.bands.low_cut, true);
    const auto high_region = radius_region(z0.height(), z0.width(), sweep.bands.high_cut, false);

    const std::size_t n = cfgs.size();
    std::vector<std::optional<RunReport>> reports(n);
    std::vector<std::exception_ptr> errors(n);
    const int jobs = job.denoiser.at("kind") == "bridge" ? 1 : sweep.jobs;
    // Each run owns its denoiser and config copy; nothing mutable is shared.
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::size_t k = 0; k < n; ++k) {
        try {
            auto handle = make_denoiser(job.denoiser, cfgs[k], z0.shape(), flags);
            reports[k] = execute(task, z0, mask, cfgs[k], *handle.denoiser);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    make_output_dir(flags.output_dir);
    std::ostringstream csv;
    csv << "threshold,low_band_corr,high_band_corr\n";
    json runs = json::array();
    for (std::size_t k = 0; k < n; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu.fbst", k);
        const auto path = (fs::path(flags.output_dir) / name).string();
        save_tensor(reports[k]->output, path);
        const double low = spectral_correlation(reports[k]->output, z0, low_region);
        const double high = spectral_correlation(reports[k]->output, z0, high_region);
        csv << format_double(sweep.values[k]) << ',' << format_double(low) << ',' << format_double(high) << '\n';
        runs.push_back({{"value", sweep.values[k]},
                        {"output", path},
                        {"config", to_json(cfgs[k])},
                        {"denoiser_calls", to_json(reports[k]->denoiser_calls)},
                        {"low_band_corr", low},
                        {"high_band_corr", high}});
    }
    const auto csv_path = fs::path(flags.output_dir) / "sweep.csv";
    write_text_atomic(csv_path, csv.str());
    json manifest = {{"command", "sweep"},
                     {"task", task_name(task)},
                     {"input", job.input},
                     {"mask", job.mask.empty() ? json(nullptr) : json(job.mask)},
                     {"param", sweep.param},
                     {"values", sweep.values},
                     {"correlation_bands",
                      {{"units", "percentile"},
                       {"low_band_max", sweep.bands.low_cut},
                       {"high_band_min", sweep.bands.high_cut}}},
                     {"config", to_json(base)},
                     {"denoiser", job.denoiser},
                     {"runs", runs}};
    write_text_atomic(fs::path(flags.output_dir) / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << csv_path.string() << " (" << n << " runs)\n";
    return kOk;
}

struct BandReportFlags {
    std::string input;
    std::string units = "percentile";
    double lower = 7.0;
    double upper = 50.0;
};

int cmd_band_report(const BandReportFlags& f, std::ostream& out) {
    BandPartition p{parse_threshold_units(f.units), f.lower, f.upper};
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    const auto z = load_tensor(f.input);
    const auto e = band_energies(z, p);
    const auto fr = e.fractions();
    const json report = {{"input", f.input},
                         {"shape", {z.channels(), z.height(), z.width()}},
                         {"partition", to_json(p)},
                         {"energy", to_json(e)},
                         {"total_energy", e.total()},
                         {"fractions", to_json(fr)},
                         {"fraction_sum", fr.low + fr.mid + fr.high}};
    out << report.dump(2) << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frequency-band substitution diffusion pipelines on latent tensors", "fbsdiff"};
    app.require_subcommand(1);

    PipelineFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "run one pipeline and write output.fbst + manifest.json");
    add_pipeline_flags(*run_cmd, run_flags);
    run_cmd->add_option("--output-dir", run_flags.output_dir)->required();

    PipelineFlags sweep_flags;
    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "one run per parameter value; writes sweep.csv");
    add_pipeline_flags(*sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--output-dir", sweep_flags.output_dir)->required();
    sweep_cmd->add_option("--param", sweep.param, "pt_lp|pt_hp|pt_mp1|pt_mp2|th_*|lambda|omega");
    sweep_cmd->add_option("--values", sweep.values_text, "comma-separated values");
    sweep_cmd->add_option("--jobs", sweep.jobs, "runs executed in parallel");
    sweep_cmd->add_option("--corr-low-cut", sweep.bands.low_cut, "low band: percentile radius <= cut");
    sweep_cmd->add_option("--corr-high-cut", sweep.bands.high_cut, "high band: percentile radius > cut");

    BandReportFlags report_flags;
    auto* report_cmd = app.add_subcommand("band-report", "DCT band-energy fractions of a tensor");
    report_cmd->add_option("input,--input", report_flags.input)->required();
    report_cmd->add_option("--units", report_flags.units, "percentile | coordinate_sum");
    report_cmd->add_option("--lower", report_flags.lower, "low band upper edge");
    report_cmd->add_option("--upper", report_flags.upper, "mid band upper edge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run_flags, out);
        if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep, out);
        return cmd_band_report(report_flags, out);
    } catch (const TensorFormatError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const TransportError& e) {
        err << "bridge transport error: " << e.what() << '\n';
        return kBridgeError;
    } catch (const ProtocolError& e) {
        err << "bridge protocol error: " << e.what() << '\n';
        return kBridgeError;
    } catch (const RemoteError& e) {
        err << "bridge remote error: " << e.what() << '\n';
        return kBridgeError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fbs::cli
