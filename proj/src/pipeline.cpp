#include "uwsim/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "uwsim/hash.hpp"
#include "uwsim/image_io.hpp"
#include "uwsim/loss.hpp"
#include "uwsim/optics.hpp"
#include "uwsim/rng.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;

namespace uwsim {

namespace {

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

std::array<double, 3> triple(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) config_error(key + " must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            config_error("unknown key '" + (scope.empty() ? key : scope + "." + key) + "'");
        }
    }
}

WaterProfile parse_water(const nlohmann::json& j) {
    reject_unknown_keys(j, {"preset", "beta", "veiling", "presets_file"}, "water");
    WaterProfile p;
    if (j.contains("preset")) {
        const std::string name = j["preset"].get<std::string>();
        if (j.contains("presets_file")) {
            bool found = false;
            for (const auto& cand : load_water_presets(j["presets_file"].get<std::string>())) {
                if (cand.name == name) { p = cand; found = true; break; }
            }
            if (!found) config_error("preset '" + name + "' not found in presets_file");
        } else {
            p = jerlov_preset(name);
        }
    } else if (!j.contains("beta")) {
        config_error("water needs either a preset name or inline beta values");
    }
    if (j.contains("beta")) p.beta = triple(j["beta"], "water.beta");
    if (j.contains("veiling")) p.veiling = triple(j["veiling"], "water.veiling");
    validate(p);
    return p;
}

std::string model_name(DegradeModel m) {
    switch (m) {
    case DegradeModel::Classic: return "classic";
    case DegradeModel::Scatter: return "scatter";
    case DegradeModel::ScatterTurbidity: return "scatter+turbidity";
    }
    return "classic";
}

struct ManifestRow {
    std::string id;
    nlohmann::json row;
};

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(path + ": cannot open manifest");
    std::vector<ManifestRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": manifest line is not valid JSON: " + e.what());
        }
        if (!j.contains("id")) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": row has no id");
        }
        rows.push_back({j["id"].get<std::string>(), std::move(j)});
    }
    return rows;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    fs::path fp(p);
    if (fp.is_absolute()) return p;
    return (fs::path(base_dir) / fp).string();
}

void export_image(const ImagePlane& img, const std::string& path, bool clamp) {
    if (!clamp) {
        for (float v : img.data()) {
            if (v < 0.0f || v > 1.0f) {
                throw std::runtime_error(path + ": values outside [0,1] with clamp_export=false");
            }
        }
    }
    save_rgb16(img, path); // quantization clamps
}

// Signed residual mapped onto [0,1]: v_png = (v + 1) / 2, i.e. the affine
// map [-1,1] -> [0,65535] after 16-bit quantization.
ImagePlane residual_to_unit(const ImagePlane& residual) {
    ImagePlane out(residual.height(), residual.width());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (residual.data()[i] + 1.0f) * 0.5f;
    }
    return out;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"input_manifest", "output_dir", "model", "water", "scatter", "turbidity",
                         "seed", "depth", "fast", "exact_scatter", "clamp_export", "srgb_input",
                         "straight_path_semantics", "residual_png", "threads"},
                        "");
    PipelineConfig c;
    if (j.contains("input_manifest")) c.input_manifest = j["input_manifest"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("model")) {
        const std::string m = j["model"].get<std::string>();
        if (m == "classic") c.model = DegradeModel::Classic;
        else if (m == "scatter") c.model = DegradeModel::Scatter;
        else if (m == "scatter+turbidity") c.model = DegradeModel::ScatterTurbidity;
        else config_error("model must be classic, scatter or scatter+turbidity");
    }
    if (j.contains("water")) c.water = parse_water(j["water"]);
    if (j.contains("scatter")) {
        const auto& s = j["scatter"];
        reject_unknown_keys(s, {"alpha", "gamma", "kernel_cutoff", "normalization",
                                "delta_sigma_eps"},
                            "scatter");
        if (s.contains("alpha")) c.scatter.alpha = triple(s["alpha"], "scatter.alpha");
        if (s.contains("gamma")) c.scatter.gamma = triple(s["gamma"], "scatter.gamma");
        if (s.contains("kernel_cutoff")) c.scatter.kernel_cutoff = s["kernel_cutoff"].get<double>();
        if (s.contains("delta_sigma_eps")) c.scatter.delta_sigma_eps = s["delta_sigma_eps"].get<double>();
        if (s.contains("normalization")) {
            const std::string n = s["normalization"].get<std::string>();
            if (n == "verbatim") c.scatter.normalization = KernelNormalization::Verbatim;
            else if (n == "normalized") c.scatter.normalization = KernelNormalization::Normalized;
            else config_error("scatter.normalization must be 'verbatim' or 'normalized'");
        }
        validate(c.scatter);
    }
    if (j.contains("turbidity")) {
        const auto& t = j["turbidity"];
        reject_unknown_keys(t, {"u", "sp_col", "pr", "sigma", "bipolar"}, "turbidity");
        if (t.contains("u")) c.turbidity.u = t["u"].get<double>();
        if (t.contains("sp_col")) c.turbidity.sp_col = triple(t["sp_col"], "turbidity.sp_col");
        if (t.contains("pr")) c.turbidity.pr = triple(t["pr"], "turbidity.pr");
        if (t.contains("sigma")) c.turbidity.sigma = triple(t["sigma"], "turbidity.sigma");
        if (t.contains("bipolar")) c.turbidity.bipolar = t["bipolar"].get<bool>();
        validate(c.turbidity);
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("depth")) {
        const auto& d = j["depth"];
        reject_unknown_keys(d, {"scale", "clip", "half_resolution"}, "depth");
        if (d.contains("scale")) c.depth.scale = d["scale"].get<double>();
        if (d.contains("clip")) {
            if (!d["clip"].is_array() || d["clip"].size() != 2) config_error("depth.clip must be [min, max]");
            c.depth.clip_min = d["clip"][0].get<double>();
            c.depth.clip_max = d["clip"][1].get<double>();
        }
        if (d.contains("half_resolution")) c.depth.half_resolution = d["half_resolution"].get<bool>();
        if (!(c.depth.scale > 0.0)) config_error("depth.scale must be > 0");
        if (!(c.depth.clip_min > 0.0) || !(c.depth.clip_min < c.depth.clip_max)) {
            config_error("depth.clip needs 0 < min < max");
        }
    }
    if (j.contains("fast")) {
        const auto& f = j["fast"];
        reject_unknown_keys(f, {"bins", "bin_strategy"}, "fast");
        if (f.contains("bins")) c.bins = f["bins"].get<int>();
        if (f.contains("bin_strategy")) {
            const std::string s = f["bin_strategy"].get<std::string>();
            if (s == "uniform") c.bin_strategy = BinStrategy::Uniform;
            else if (s == "quantile") c.bin_strategy = BinStrategy::Quantile;
            else config_error("fast.bin_strategy must be 'uniform' or 'quantile'");
        }
        if (c.bins < 1) config_error("fast.bins must be >= 1");
    }
    if (j.contains("exact_scatter")) c.exact_scatter = j["exact_scatter"].get<bool>();
    if (j.contains("clamp_export")) c.clamp_export = j["clamp_export"].get<bool>();
    if (j.contains("srgb_input")) c.srgb_input = j["srgb_input"].get<bool>();
    if (j.contains("straight_path_semantics")) {
        c.straight_path_semantics = j["straight_path_semantics"].get<bool>();
    }
    if (j.contains("residual_png")) c.residual_png = j["residual_png"].get<bool>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    return c;
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    j["input_manifest"] = input_manifest;
    j["output_dir"] = output_dir;
    j["model"] = model_name(model);
    j["water"] = {{"beta", water.beta}, {"veiling", water.veiling}};
    if (!water.name.empty()) j["water"]["preset"] = water.name;
    j["scatter"] = {
        {"alpha", scatter.alpha},
        {"gamma", scatter.gamma},
        {"kernel_cutoff", scatter.kernel_cutoff},
        {"normalization",
         scatter.normalization == KernelNormalization::Verbatim ? "verbatim" : "normalized"},
        {"delta_sigma_eps", scatter.delta_sigma_eps}};
    j["turbidity"] = {{"u", turbidity.u},
                      {"sp_col", turbidity.sp_col},
                      {"pr", turbidity.pr},
                      {"sigma", turbidity.sigma},
                      {"bipolar", turbidity.bipolar}};
    j["seed"] = seed;
    j["depth"] = {{"scale", depth.scale},
                  {"clip", {depth.clip_min, depth.clip_max}},
                  {"half_resolution", depth.half_resolution}};
    j["fast"] = {{"bins", bins},
                 {"bin_strategy", bin_strategy == BinStrategy::Uniform ? "uniform" : "quantile"}};
    j["exact_scatter"] = exact_scatter;
    j["clamp_export"] = clamp_export;
    j["srgb_input"] = srgb_input;
    j["straight_path_semantics"] = straight_path_semantics;
    j["residual_png"] = residual_png;
    j["threads"] = threads;
    return j;
}

nlohmann::json SampleRecord::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["stream_id"] = stream_id;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["outputs"] = outputs;
    j["hashes"] = hashes;
    return j;
}

namespace {

SampleRecord process_sample(const PipelineConfig& cfg, const ManifestRow& row,
                            std::uint64_t stream_id, const std::string& manifest_dir) {
    SampleRecord rec;
    rec.id = row.id;
    rec.stream_id = stream_id;
    try {
        if (!row.row.contains("clean") || !row.row.contains("depth")) {
            throw std::runtime_error("manifest row needs 'clean' and 'depth' paths");
        }
        const std::string clean_path = resolve_path(manifest_dir, row.row["clean"].get<std::string>());
        const std::string depth_path = resolve_path(manifest_dir, row.row["depth"].get<std::string>());

        ImagePlane clean = load_rgb(clean_path);
        if (cfg.srgb_input) clean = srgb_to_linear(clean);
        DepthMap depth = load_depth(depth_path, cfg.depth.scale, cfg.depth.clip_min,
                                    cfg.depth.clip_max);
        require_matching_dims(clean, depth);
        if (cfg.depth.half_resolution) {
            clean = downsample_half(clean);
            depth = downsample_half(depth);
        }

        const TransmissionMap t = transmission_map(depth, cfg.water);
        const ImagePlane initial = degrade_classic(clean, t, cfg.water);

        ImagePlane final_image = initial;
        ImagePlane particles;
        if (cfg.model != DegradeModel::Classic) {
            ScatterField field = scatter_likelihood(depth, cfg.scatter);
            if (cfg.straight_path_semantics) {
                // Alternate reading: exp(-alpha z) is the straight-path share,
                // so its complement feeds the scattered term instead.
                for (float& v : field.map.data()) v = 1.0f - v;
            }
            const ImagePlane j_sct =
                cfg.exact_scatter
                    ? scattered_radiance_exact(clean, depth, field, cfg.scatter)
                    : scattered_radiance_fast(clean, depth, field, cfg.scatter, cfg.bins,
                                              cfg.bin_strategy, 1);
            final_image = compose_scattered(clean, j_sct, field, t, cfg.water);
            if (cfg.model == DegradeModel::ScatterTurbidity) {
                particles = make_particle_layer(clean.height(), clean.width(), cfg.turbidity,
                                                RngStream(cfg.seed, stream_id));
                final_image = blend_turbidity(final_image, particles, cfg.turbidity.u);
            }
        }

        ImagePlane residual(final_image.height(), final_image.width());
        for (std::size_t i = 0; i < residual.data().size(); ++i) {
            residual.data()[i] = final_image.data()[i] - initial.data()[i];
        }

        // Manifest entries hold paths relative to the output directory, so a
        // run's bytes do not depend on where that directory lives.
        const fs::path out_dir(cfg.output_dir);
        auto emit = [&](const std::string& name, const std::string& filename) {
            rec.outputs[name] = filename;
            return (out_dir / filename).string();
        };
        export_image(final_image, emit("degraded", rec.id + "_degraded.png"), cfg.clamp_export);
        export_image(initial, emit("initial", rec.id + "_initial.png"), cfg.clamp_export);
        save_rgb16(t.map, emit("transmission", rec.id + "_transmission.png"));
        save_f32(residual, emit("residual_f32", rec.id + "_residual.f32"));
        if (cfg.residual_png) {
            save_rgb16(residual_to_unit(residual), emit("residual_png", rec.id + "_residual.png"));
        }
        if (!particles.empty()) {
            export_image(particles, emit("particles", rec.id + "_particles.png"), cfg.clamp_export);
        }
        for (const auto& [name, rel] : rec.outputs) {
            rec.hashes[name] = hash_file((out_dir / rel).string());
        }
        rec.status = "success";
    } catch (const std::exception& e) {
        rec.status = "failure";
        rec.error = e.what();
        rec.outputs.clear();
        rec.hashes.clear();
    }
    return rec;
}

} // namespace

GenerateSummary run_generate(const PipelineConfig& cfg) {
    if (cfg.input_manifest.empty()) config_error("input_manifest is required");
    if (cfg.output_dir.empty()) config_error("output_dir is required");
    validate(cfg.water);
    validate(cfg.scatter);
    validate(cfg.turbidity);
    if (cfg.bins < 1) config_error("fast.bins must be >= 1");

    const std::vector<ManifestRow> rows = read_manifest(cfg.input_manifest);
    {
        std::vector<std::string> ids;
        for (const auto& r : rows) ids.push_back(r.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
            throw std::runtime_error(cfg.input_manifest + ": duplicate sample ids");
        }
    }
    fs::create_directories(cfg.output_dir);
    const std::string manifest_dir = fs::path(cfg.input_manifest).parent_path().string();

    GenerateSummary summary;
    summary.records.resize(rows.size());
    detail::parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        summary.records[i] = process_sample(cfg, rows[i], static_cast<std::uint64_t>(i),
                                            manifest_dir);
    });
    for (const auto& r : summary.records) {
        if (r.status != "success") ++summary.failures;
    }

    const fs::path out_dir(cfg.output_dir);
    {
        std::ofstream os(out_dir / "run_config.json");
        os << cfg.to_json().dump(2) << "\n";
    }
    summary.manifest_path = (out_dir / "manifest.jsonl").string();
    std::ofstream os(summary.manifest_path);
    if (!os) throw std::runtime_error(summary.manifest_path + ": cannot write manifest");
    for (const auto& r : summary.records) os << r.to_json().dump() << "\n";
    return summary;
}

EvalPlane load_eval_plane(const std::string& path) {
    EvalPlane out;
    if (fs::path(path).extension() == ".f32") {
        if (f32_is_image(path)) out.image = load_f32_image(path);
        else out.depth = load_f32_plane(path);
        return out;
    }
    // PNG: 3-channel loads as an image; single-channel 16-bit as raw depth
    try {
        out.image = load_rgb(path);
        return out;
    } catch (const std::exception&) {
        out.depth = load_depth(path, 1.0, 1e-9, 1e9); // raw values, no clip
        return out;
    }
}

namespace {

std::string pick_path(const nlohmann::json& row, const std::string& key,
                      const std::string& manifest_dir) {
    std::string p;
    if (row.contains("outputs") && row["outputs"].contains(key)) {
        p = row["outputs"][key].get<std::string>();
    } else if (row.contains(key)) {
        p = row[key].get<std::string>();
    } else if (row.contains("path")) {
        p = row["path"].get<std::string>();
    } else {
        throw std::runtime_error("manifest row for id '" + row["id"].get<std::string>() +
                                 "' has no '" + key + "' or 'path' entry");
    }
    return resolve_path(manifest_dir, p);
}

void apply_cap(ImagePlane& img, double lo, double hi) {
    for (float& v : img.data()) v = std::clamp(v, static_cast<float>(lo), static_cast<float>(hi));
}
void apply_cap(DepthMap& d, double lo, double hi) {
    for (double& v : d.data()) v = std::clamp(v, lo, hi);
}

} // namespace

EvaluateSummary run_evaluate(const std::string& pred_manifest, const std::string& truth_manifest,
                             const EvaluateConventions& conv) {
    const auto pred_rows = read_manifest(pred_manifest);
    const auto truth_rows = read_manifest(truth_manifest);
    const std::string pred_dir = fs::path(pred_manifest).parent_path().string();
    const std::string truth_dir = fs::path(truth_manifest).parent_path().string();

    std::map<std::string, const ManifestRow*> truth_by_id;
    for (const auto& r : truth_rows) truth_by_id[r.id] = &r;

    EvaluateSummary summary;
    double sums[7] = {};
    std::size_t px_total = 0;

    auto add_failure = [&](const std::string& id, const std::string& why) {
        PairResult pr;
        pr.id = id;
        pr.ok = false;
        pr.error = why;
        summary.pairs.push_back(std::move(pr));
        ++summary.failed;
    };

    for (const auto& pred : pred_rows) {
        const auto it = truth_by_id.find(pred.id);
        if (it == truth_by_id.end()) {
            add_failure(pred.id, "id missing in truth manifest");
            continue;
        }
        try {
            EvalPlane p = load_eval_plane(pick_path(pred.row, conv.pred_key, pred_dir));
            EvalPlane t = load_eval_plane(pick_path(it->second->row, conv.truth_key, truth_dir));
            MetricsReport report;
            if (p.image && t.image) {
                if (conv.half_res) *t.image = downsample_half(*t.image);
                if (conv.depth_cap) {
                    apply_cap(*p.image, conv.depth_cap->first, conv.depth_cap->second);
                    apply_cap(*t.image, conv.depth_cap->first, conv.depth_cap->second);
                }
                report = evaluate_pair(*t.image, *p.image);
            } else if (p.depth && t.depth) {
                if (conv.half_res) *t.depth = downsample_half(*t.depth);
                if (conv.depth_cap) {
                    apply_cap(*p.depth, conv.depth_cap->first, conv.depth_cap->second);
                    apply_cap(*t.depth, conv.depth_cap->first, conv.depth_cap->second);
                }
                report = evaluate_pair(*t.depth, *p.depth);
            } else {
                throw std::runtime_error("prediction and truth are not the same kind of plane");
            }
            PairResult pr;
            pr.id = pred.id;
            pr.ok = true;
            pr.report = report;
            summary.pairs.push_back(std::move(pr));
            ++summary.evaluated;
            sums[0] += report.rel;
            sums[1] += report.rms;
            sums[2] += report.log10_err;
            sums[3] += report.delta1;
            sums[4] += report.delta2;
            sums[5] += report.delta3;
            sums[6] += report.ssim;
            px_total += report.n_pixels;
        } catch (const std::exception& e) {
            add_failure(pred.id, e.what());
        }
    }
    for (const auto& truth : truth_rows) {
        bool seen = false;
        for (const auto& pred : pred_rows) {
            if (pred.id == truth.id) { seen = true; break; }
        }
        if (!seen) add_failure(truth.id, "id missing in prediction manifest");
    }

    if (summary.evaluated > 0) {
        const double n = summary.evaluated;
        summary.aggregate.rel = sums[0] / n;
        summary.aggregate.rms = sums[1] / n;
        summary.aggregate.log10_err = sums[2] / n;
        summary.aggregate.delta1 = sums[3] / n;
        summary.aggregate.delta2 = sums[4] / n;
        summary.aggregate.delta3 = sums[5] / n;
        summary.aggregate.ssim = sums[6] / n;
        summary.aggregate.n_pixels = px_total;
    }
    return summary;
}

} // namespace uwsim
