#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uwsim/fit.hpp"
#include "uwsim/image_io.hpp"
#include "uwsim/loss.hpp"
#include "uwsim/pipeline.hpp"
#include "uwsim/water.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument(path + ": cannot open config file");
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": invalid JSON: " + std::string(e.what()));
    }
    return j;
}

// Applies "a.b.c=value" onto a JSON document; the value is parsed as JSON
// when possible and falls back to a plain string.
void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" + spec + "'");
    }
    const std::string keypath = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const std::exception&) {
        value = raw;
    }
    json* node = &doc;
    std::istringstream keys(keypath);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) parts.push_back(key);
    if (parts.empty()) throw std::invalid_argument("--set: empty key in '" + spec + "'");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = value;
}

std::vector<double> parse_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 bool exact_scatter, const std::vector<std::string>& overrides,
                 std::optional<int> threads) {
    json doc = load_json_file(config_path);
    for (const auto& o : overrides) apply_override(doc, o);
    if (seed) doc["seed"] = *seed;
    if (exact_scatter) doc["exact_scatter"] = true;
    if (threads) doc["threads"] = *threads;
    const uwsim::PipelineConfig cfg = uwsim::PipelineConfig::from_json(doc);

    const uwsim::GenerateSummary summary = uwsim::run_generate(cfg);
    int ok = 0;
    for (const auto& r : summary.records) {
        if (r.status == "success") ++ok;
        else std::cerr << "sample " << r.id << " failed: " << r.error << "\n";
    }
    std::cout << "generated " << ok << "/" << summary.records.size()
              << " samples, manifest: " << summary.manifest_path << "\n";
    return summary.failures == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_evaluate(const std::string& pred, const std::string& truth, bool half_res,
                 const std::vector<double>& depth_cap, const std::string& pred_key,
                 const std::string& truth_key, const std::string& report_path) {
    uwsim::EvaluateConventions conv;
    conv.half_res = half_res;
    conv.pred_key = pred_key;
    conv.truth_key = truth_key;
    if (!depth_cap.empty()) {
        if (depth_cap.size() != 2 || !(depth_cap[0] < depth_cap[1])) {
            throw std::invalid_argument("--depth-cap expects LO HI with LO < HI");
        }
        conv.depth_cap = {depth_cap[0], depth_cap[1]};
    }
    const uwsim::EvaluateSummary summary = uwsim::run_evaluate(pred, truth, conv);

    std::ostringstream lines;
    for (const auto& pair : summary.pairs) {
        json j;
        j["id"] = pair.id;
        if (pair.ok) {
            j["metrics"] = json::parse(pair.report.to_json_string());
        } else {
            j["error"] = pair.error;
        }
        lines << j.dump() << "\n";
    }
    json agg;
    agg["aggregate"] = json::parse(summary.aggregate.to_json_string());
    agg["evaluated"] = summary.evaluated;
    agg["failed"] = summary.failed;
    lines << agg.dump() << "\n";

    std::cout << lines.str();
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) throw std::runtime_error(report_path + ": cannot write report");
        os << lines.str();
    }
    return summary.failed == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_fit(const std::string& clean, const std::string& depth, const std::string& observed,
            const std::string& config_path) {
    uwsim::FitProblem problem;
    double scale = 0.001, clip_min = 0.4, clip_max = 10.0;
    problem.init.beta = {0.5, 0.5, 0.5};
    problem.init.veiling = {0.5, 0.5, 0.5};
    if (!config_path.empty()) {
        const json j = load_json_file(config_path);
        if (j.contains("init")) {
            if (j["init"].contains("beta")) {
                for (int c = 0; c < 3; ++c) problem.init.beta[c] = j["init"]["beta"][c].get<double>();
            }
            if (j["init"].contains("veiling")) {
                for (int c = 0; c < 3; ++c) problem.init.veiling[c] = j["init"]["veiling"][c].get<double>();
            }
        }
        if (j.contains("bounds")) {
            if (j["bounds"].contains("beta_max")) problem.bounds.beta_max = j["bounds"]["beta_max"].get<double>();
            if (j["bounds"].contains("beta_min")) problem.bounds.beta_min = j["bounds"]["beta_min"].get<double>();
        }
        if (j.contains("tol")) problem.tol = j["tol"].get<double>();
        if (j.contains("max_iters")) problem.max_iters = j["max_iters"].get<int>();
        if (j.contains("depth")) {
            if (j["depth"].contains("scale")) scale = j["depth"]["scale"].get<double>();
            if (j["depth"].contains("clip")) {
                clip_min = j["depth"]["clip"][0].get<double>();
                clip_max = j["depth"]["clip"][1].get<double>();
            }
        }
    }
    problem.clean = uwsim::load_rgb(clean);
    problem.depth = uwsim::load_depth(depth, scale, clip_min, clip_max);
    problem.observed = uwsim::load_rgb(observed);

    const uwsim::FitResult result = uwsim::fit(problem);
    json out;
    out["beta"] = result.profile.beta;
    out["veiling"] = result.profile.veiling;
    out["final_mse"] = result.final_mse;
    out["iterations"] = result.iterations;
    out["converged"] = result.converged;
    out["gradient_norm"] = result.gradient_norm;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

template <typename Fn>
double on_plane_pair(const std::string& a_path, const std::string& b_path, Fn fn) {
    const uwsim::EvalPlane a = uwsim::load_eval_plane(a_path);
    const uwsim::EvalPlane b = uwsim::load_eval_plane(b_path);
    if (a.image && b.image) return fn(*a.image, *b.image);
    if (a.depth && b.depth) return fn(*a.depth, *b.depth);
    throw std::invalid_argument("loss inputs must both be images or both be single planes");
}

int cmd_loss(const std::string& name, const std::string& a, const std::string& b,
             const std::vector<double>& weights, const std::vector<double>& components) {
    double value = 0.0;
    if (name == "l1") {
        value = on_plane_pair(a, b, [](const auto& x, const auto& y) { return uwsim::l1_mean(x, y); });
    } else if (name == "ssim") {
        value = on_plane_pair(a, b, [](const auto& x, const auto& y) { return uwsim::ssim_loss(x, y); });
    } else if (name == "pair-fixed") {
        const double l1 = weights.size() > 0 ? weights[0] : 0.1;
        const double l2 = weights.size() > 1 ? weights[1] : 0.1;
        value = on_plane_pair(a, b, [&](const auto& x, const auto& y) {
            return uwsim::pair_loss_fixed(x, y, l1, l2);
        });
    } else if (name == "pair-weighted") {
        if (weights.size() != 1) throw std::invalid_argument("pair-weighted needs --weights w");
        value = on_plane_pair(a, b, [&](const auto& x, const auto& y) {
            return uwsim::pair_loss_weighted(x, y, weights[0]);
        });
    } else if (name == "total-t1" || name == "total-t2" || name == "total-t3") {
        const std::size_t need = name == "total-t1" ? 2 : name == "total-t2" ? 3 : 4;
        if (components.size() != need) {
            throw std::invalid_argument(name + " needs --components with " + std::to_string(need) +
                                        " values");
        }
        if (need == 2) value = uwsim::total_technique1(components[0], components[1]);
        else if (need == 3) value = uwsim::total_technique2(components[0], components[1], components[2]);
        else value = uwsim::total_technique3(components[0], components[1], components[2], components[3]);
    } else if (name == "total-v2") {
        if (components.empty()) throw std::invalid_argument("total-v2 needs --components");
        value = uwsim::total_variant2(components, weights);
    } else if (name == "batch-mean") {
        value = uwsim::batch_mean_weight(weights);
    } else {
        throw std::invalid_argument(
            "unknown loss '" + name +
            "'; valid: l1, ssim, pair-fixed, pair-weighted, total-t1, total-t2, total-t3, "
            "total-v2, batch-mean");
    }
    std::printf("%s=%.17g\n", name.c_str(), value);
    return kExitOk;
}

int cmd_presets(const std::string& file) {
    const std::vector<uwsim::WaterProfile> presets =
        file.empty() ? uwsim::builtin_water_presets() : uwsim::load_water_presets(file);
    for (const auto& p : presets) {
        std::printf("%-4s beta=(%.3f %.3f %.3f) veiling=(%.3f %.3f %.3f)\n", p.name.c_str(),
                    p.beta[0], p.beta[1], p.beta[2], p.veiling[0], p.veiling[1], p.veiling[2]);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater/hazy image degradation simulator and evaluation toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Degrade every RGB-D pair in a manifest");
    std::string gen_config;
    std::optional<std::uint64_t> gen_seed;
    bool gen_exact = false;
    std::optional<int> gen_threads;
    std::vector<std::string> gen_sets;
    gen->add_option("--config", gen_config, "Pipeline config (JSON)")->required();
    gen->add_option("--seed", gen_seed, "Override the config seed");
    gen->add_flag("--exact-scatter", gen_exact, "Use the exact scattering sum instead of the binned path");
    gen->add_option("--threads", gen_threads, "Worker threads (samples are independent)");
    gen->add_option("--set", gen_sets, "Override a config key, dotted path: --set water.preset=III");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Metric suite over aligned prediction/truth manifests");
    std::string ev_pred, ev_truth, ev_pred_key = "degraded", ev_truth_key = "degraded", ev_report;
    bool ev_half = false;
    std::vector<double> ev_cap;
    ev->add_option("--pred", ev_pred, "Prediction manifest (JSONL)")->required();
    ev->add_option("--truth", ev_truth, "Ground-truth manifest (JSONL)")->required();
    ev->add_flag("--half-res", ev_half, "Box-average the truth to half resolution first");
    ev->add_option("--depth-cap", ev_cap, "Clamp both planes into [LO, HI]")->expected(2);
    ev->add_option("--pred-key", ev_pred_key, "Manifest output key to compare (default: degraded)");
    ev->add_option("--truth-key", ev_truth_key, "Manifest output key to compare (default: degraded)");
    ev->add_option("--report", ev_report, "Also write the JSONL report to this file");

    // fit
    auto* ft = app.add_subcommand("fit", "Recover attenuation and veiling light from a triple");
    std::string fit_clean, fit_depth, fit_observed, fit_config;
    ft->add_option("--clean", fit_clean, "Clean RGB image (PNG)")->required();
    ft->add_option("--depth", fit_depth, "Depth map (PNG-16 or .f32)")->required();
    ft->add_option("--observed", fit_observed, "Degraded RGB image (PNG)")->required();
    ft->add_option("--config", fit_config, "Optional JSON with init/bounds/tol/depth conventions");

    // loss
    auto* ls = app.add_subcommand("loss", "Evaluate a named loss or total");
    std::string loss_name, loss_a, loss_b, loss_weights_csv, loss_components_csv;
    ls->add_option("name", loss_name,
                   "l1|ssim|pair-fixed|pair-weighted|total-t1|total-t2|total-t3|total-v2|batch-mean")
        ->required();
    ls->add_option("--a", loss_a, "First plane (PNG or .f32)");
    ls->add_option("--b", loss_b, "Second plane (PNG or .f32)");
    ls->add_option("--weights", loss_weights_csv, "Comma-separated weights");
    ls->add_option("--components", loss_components_csv, "Comma-separated loss components (totals)");

    // presets
    auto* pr = app.add_subcommand("presets", "Water presets");
    auto* pr_list = pr->add_subcommand("list", "Print the preset table");
    std::string presets_file;
    pr_list->add_option("--file", presets_file, "Load presets from this table instead of the built-ins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_config, gen_seed, gen_exact, gen_sets, gen_threads);
        if (ev->parsed()) {
            return cmd_evaluate(ev_pred, ev_truth, ev_half, ev_cap, ev_pred_key, ev_truth_key,
                                ev_report);
        }
        if (ft->parsed()) return cmd_fit(fit_clean, fit_depth, fit_observed, fit_config);
        if (ls->parsed()) {
            const auto weights = loss_weights_csv.empty()
                                     ? std::vector<double>{}
                                     : parse_list(loss_weights_csv, "--weights");
            const auto components = loss_components_csv.empty()
                                        ? std::vector<double>{}
                                        : parse_list(loss_components_csv, "--components");
            if ((loss_name != "batch-mean" && loss_name.rfind("total-", 0) != 0) &&
                (loss_a.empty() || loss_b.empty())) {
                throw std::invalid_argument("loss '" + loss_name + "' needs --a and --b");
            }
            return cmd_loss(loss_name, loss_a, loss_b, weights, components);
        }
        if (pr->parsed()) {
            if (!pr_list->parsed()) throw std::invalid_argument("usage: presets list [--file PATH]");
            return cmd_presets(presets_file);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartialFailure;
    }
    return kExitConfigError;
}
