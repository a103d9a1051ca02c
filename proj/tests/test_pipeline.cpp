#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "helpers.hpp"
#include "uwsim/hash.hpp"
#include "uwsim/image_io.hpp"
#include "uwsim/pipeline.hpp"
#include <cstdint>
#include <stdexcept>
#include <unistd.h>

using namespace uwsim;
using namespace uwsim::test;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() /
               ("uwsim_pipe_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(root / "in");
    }
    ~Workspace() { fs::remove_all(root); }

    std::string in(const std::string& name) const { return (root / "in" / name).string(); }
    std::string out(const std::string& name) const { return (root / name).string(); }

    // manifest output entries are relative to the run's output directory
    std::string resolve(const std::string& outdir, const SampleRecord& r,
                        const std::string& key) const {
        return (fs::path(out(outdir)) / r.outputs.at(key)).string();
    }

    // Writes n RGB-D pairs plus a manifest; returns the manifest path.
    std::string make_inputs(int n, int h = 24, int w = 24) {
        std::ofstream manifest(in("manifest.jsonl"));
        for (int i = 0; i < n; ++i) {
            const std::string id = "s" + std::to_string(i);
            save_rgb16(random_image(h, w, 100 + i), in(id + "_rgb.png"));
            save_depth_png16(random_depth(h, w, 200 + i, 0.5, 9.5), in(id + "_d.png"), 0.001);
            manifest << R"({"id": ")" << id << R"(", "clean": ")" << id << R"(_rgb.png", )"
                     << R"("depth": ")" << id << "_d.png\"}\n";
        }
        return in("manifest.jsonl");
    }

    nlohmann::json base_config(const std::string& manifest, const std::string& outdir) {
        nlohmann::json j;
        j["input_manifest"] = manifest;
        j["output_dir"] = out(outdir);
        j["model"] = "scatter+turbidity";
        j["water"] = {{"preset", "III"}};
        j["scatter"] = {{"alpha", {0.4, 0.4, 0.4}}, {"gamma", {0.8, 0.8, 0.8}}};
        j["turbidity"] = {{"u", 0.9},
                          {"sp_col", {0.8, 0.8, 0.8}},
                          {"pr", {0.02, 0.02, 0.02}},
                          {"sigma", {1.0, 1.0, 1.0}}};
        j["seed"] = 42;
        j["fast"] = {{"bins", 4}};
        return j;
    }
};

std::map<std::string, std::string> tree_hashes(const std::string& dir) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            hashes[fs::relative(entry.path(), dir).string()] = hash_file(entry.path().string());
        }
    }
    return hashes;
}

} // namespace

TEST_CASE("generate emits every output and a complete manifest") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(3);
    const PipelineConfig cfg = PipelineConfig::from_json(ws.base_config(manifest, "out"));
    const GenerateSummary summary = run_generate(cfg);

    CHECK(summary.failures == 0);
    REQUIRE(summary.records.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const SampleRecord& r = summary.records[i];
        CHECK(r.status == "success");
        CHECK(r.stream_id == i);
        for (const char* key : {"degraded", "initial", "transmission", "residual_f32", "particles"}) {
            REQUIRE(r.outputs.count(key) == 1);
            CHECK(fs::exists(ws.resolve("out", r, key)));
            CHECK(r.hashes.at(key).rfind("fnv1a64:", 0) == 0);
        }
    }
    CHECK(fs::exists(summary.manifest_path));
    CHECK(fs::exists(ws.out("out") + "/run_config.json"));

}

TEST_CASE("residual file equals final minus initial") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(1);
    nlohmann::json j = ws.base_config(manifest, "out_res");
    // gentle energy-conserving settings keep the export away from the clamp
    j["model"] = "scatter";
    j["scatter"] = {{"alpha", {0.2, 0.2, 0.2}},
                    {"gamma", {0.3, 0.3, 0.3}},
                    {"normalization", "normalized"}};
    const GenerateSummary summary = run_generate(PipelineConfig::from_json(j));
    REQUIRE(summary.failures == 0);

    const SampleRecord& r = summary.records[0];
    const ImagePlane residual = load_f32_image(ws.resolve("out_res", r, "residual_f32"));
    const ImagePlane degraded = load_rgb(ws.resolve("out_res", r, "degraded"));
    const ImagePlane initial = load_rgb(ws.resolve("out_res", r, "initial"));
    // both PNG reloads move by at most half a 16-bit step each
    std::size_t checked = 0;
    for (std::size_t i = 0; i < residual.data().size(); ++i) {
        if (degraded.data()[i] >= 1.0f) continue; // may have been clamped at export
        const float re = degraded.data()[i] - initial.data()[i];
        CHECK(std::abs(residual.data()[i] - re) <= 3e-5f);
        ++checked;
    }
    CHECK(checked > residual.data().size() / 2);
}

TEST_CASE("generate is deterministic across reruns and worker counts") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(4);

    auto run_with = [&](const std::string& outdir, int threads) {
        nlohmann::json j = ws.base_config(manifest, outdir);
        j["threads"] = threads;
        run_generate(PipelineConfig::from_json(j));
        auto hashes = tree_hashes(ws.out(outdir));
        // run_config.json records the output dir and thread count; the data
        // outputs and the manifest (relative paths) must match byte for byte
        hashes.erase("run_config.json");
        return hashes;
    };
    const auto a = run_with("out_a", 1);
    const auto b = run_with("out_b", 1);
    const auto c = run_with("out_c", 4);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.size() >= 4 * 5 + 1);
}

TEST_CASE("per-sample failures are recorded and the run continues") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(2);
    {
        std::ofstream m(manifest, std::ios::app);
        m << R"({"id": "broken", "clean": "missing.png", "depth": "missing_d.png"})" << "\n";
    }
    const PipelineConfig cfg = PipelineConfig::from_json(ws.base_config(manifest, "out"));
    const GenerateSummary summary = run_generate(cfg);
    CHECK(summary.failures == 1);
    REQUIRE(summary.records.size() == 3);
    CHECK(summary.records[2].id == "broken");
    CHECK(summary.records[2].status == "failure");
    CHECK(summary.records[2].error.find("missing.png") != std::string::npos);
    CHECK(summary.records[0].status == "success");
}

TEST_CASE("duplicate manifest ids are rejected") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(1);
    {
        std::ofstream m(manifest, std::ios::app);
        m << R"({"id": "s0", "clean": "s0_rgb.png", "depth": "s0_d.png"})" << "\n";
    }
    const PipelineConfig cfg = PipelineConfig::from_json(ws.base_config(manifest, "out"));
    CHECK_THROWS_WITH_AS(run_generate(cfg), doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
    nlohmann::json j;
    j["input_manifest"] = "m";
    j["output_dir"] = "o";
    SUBCASE("unknown top-level key") {
        j["tyop"] = 1;
        CHECK_THROWS_WITH_AS(PipelineConfig::from_json(j), doctest::Contains("unknown key"),
                             std::invalid_argument);
    }
    SUBCASE("unknown nested key") {
        j["scatter"] = {{"alpa", {1, 1, 1}}};
        CHECK_THROWS_WITH_AS(PipelineConfig::from_json(j), doctest::Contains("scatter.alpa"),
                             std::invalid_argument);
    }
    SUBCASE("bad model name") {
        j["model"] = "fancy";
        CHECK_THROWS_AS(PipelineConfig::from_json(j), std::invalid_argument);
    }
    SUBCASE("bad clip") {
        j["depth"] = {{"clip", {5.0, 1.0}}};
        CHECK_THROWS_AS(PipelineConfig::from_json(j), std::invalid_argument);
    }
    SUBCASE("round trips through to_json") {
        j["model"] = "scatter";
        j["water"] = {{"preset", "II"}};
        j["seed"] = 7;
        const PipelineConfig c = PipelineConfig::from_json(j);
        const PipelineConfig c2 = PipelineConfig::from_json(c.to_json());
        CHECK(c2.seed == 7);
        CHECK(c2.model == DegradeModel::Scatter);
        CHECK(c2.water.beta == c.water.beta);
    }
}

TEST_CASE("classic model: scatter parameters never touch the output") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(1);
    nlohmann::json j = ws.base_config(manifest, "out_classic");
    j["model"] = "classic";
    const GenerateSummary summary = run_generate(PipelineConfig::from_json(j));
    REQUIRE(summary.failures == 0);
    const ImagePlane degraded = load_rgb(ws.resolve("out_classic", summary.records[0], "degraded"));
    const ImagePlane initial = load_rgb(ws.resolve("out_classic", summary.records[0], "initial"));
    CHECK(max_abs_diff(degraded, initial) == 0.0f);
    // residual is exactly zero for the classic model
    const ImagePlane residual =
        load_f32_image(ws.resolve("out_classic", summary.records[0], "residual_f32"));
    for (float v : residual.data()) CHECK(v == 0.0f);
    CHECK(summary.records[0].outputs.count("particles") == 0);
}

TEST_CASE("half-resolution convention downsamples before simulating") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(1, 32, 48);
    nlohmann::json j = ws.base_config(manifest, "out_half");
    j["depth"] = {{"half_resolution", true}};
    const GenerateSummary summary = run_generate(PipelineConfig::from_json(j));
    REQUIRE(summary.failures == 0);
    const ImagePlane degraded = load_rgb(ws.resolve("out_half", summary.records[0], "degraded"));
    CHECK(degraded.height() == 16);
    CHECK(degraded.width() == 24);
}

TEST_CASE("evaluate: identity pairs score perfectly and aggregate") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(2);
    const PipelineConfig cfg = PipelineConfig::from_json(ws.base_config(manifest, "out"));
    const GenerateSummary gen = run_generate(cfg);
    REQUIRE(gen.failures == 0);

    const EvaluateSummary ev = run_evaluate(gen.manifest_path, gen.manifest_path, {});
    CHECK(ev.evaluated == 2);
    CHECK(ev.failed == 0);
    for (const auto& pair : ev.pairs) {
        REQUIRE(pair.ok);
        CHECK(pair.report.rel == 0.0);
        CHECK(pair.report.rms == 0.0);
        CHECK(pair.report.delta1 == 1.0);
        CHECK(pair.report.ssim == 1.0);
    }
    CHECK(ev.aggregate.delta3 == 1.0);
}

TEST_CASE("evaluate: 16-bit re-encoding stays within quantization bounds") {
    Workspace ws;
    const ImagePlane original = random_image(16, 16, 77, 0.1f, 1.0f);
    save_f32(original, ws.out("truth.f32"));        // lossless float truth
    save_rgb16(original, ws.out("pred.png"));       // quantized export
    {
        std::ofstream p(ws.out("pred.jsonl"));
        p << R"({"id": "q", "path": "pred.png"})" << "\n";
        std::ofstream t(ws.out("truth.jsonl"));
        t << R"({"id": "q", "path": "truth.f32"})" << "\n";
    }
    const EvaluateSummary ev = run_evaluate(ws.out("pred.jsonl"), ws.out("truth.jsonl"), {});
    REQUIRE(ev.evaluated == 1);
    CHECK(ev.pairs[0].report.rms <= std::sqrt(3.0) / 65535.0);
    CHECK(ev.pairs[0].report.delta1 == 1.0);
}

TEST_CASE("evaluate: mismatched ids are flagged and the rest aggregates") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(2);
    const PipelineConfig cfg = PipelineConfig::from_json(ws.base_config(manifest, "out"));
    const GenerateSummary gen = run_generate(cfg);

    // truth manifest with one id renamed; lives beside the outputs so the
    // relative paths keep resolving
    std::ifstream src(gen.manifest_path);
    std::string line1, line2;
    std::getline(src, line1);
    std::getline(src, line2);
    const std::string truth_path = ws.out("out/truth.jsonl");
    {
        std::ofstream truth(truth_path);
        nlohmann::json j2 = nlohmann::json::parse(line2);
        j2["id"] = "someone_else";
        truth << line1 << "\n" << j2.dump() << "\n";
    }
    const EvaluateSummary ev = run_evaluate(gen.manifest_path, truth_path, {});
    CHECK(ev.evaluated == 1);
    CHECK(ev.failed == 2); // missing truth for s1, missing pred for someone_else
}

TEST_CASE("evaluate honors depth cap and half-res conventions") {
    Workspace ws;
    DepthMap truth_depth = ramp_depth(32, 32, 1.0, 50.0);
    DepthMap pred_depth = truth_depth;
    for (double& v : pred_depth.data()) v *= 1.1; // 10% off everywhere
    save_f32(truth_depth, ws.out("truth.f32"));
    save_f32(pred_depth, ws.out("pred.f32"));
    {
        std::ofstream p(ws.out("pred.jsonl"));
        p << R"({"id": "a", "path": "pred.f32"})" << "\n";
        std::ofstream t(ws.out("truth.jsonl"));
        t << R"({"id": "a", "path": "truth.f32"})" << "\n";
    }
    EvaluateConventions conv;
    conv.depth_cap = {{0.0, 10.0}};
    const EvaluateSummary ev = run_evaluate(ws.out("pred.jsonl"), ws.out("truth.jsonl"), conv);
    REQUIRE(ev.evaluated == 1);
    // capped at 10 on both sides: every pixel with truth >= 10 agrees exactly
    CHECK(ev.pairs[0].report.delta1 > 0.75);

    SUBCASE("half-res against a full-res truth") {
        save_f32(downsample_half(pred_depth), ws.out("pred_half.f32"));
        std::ofstream p(ws.out("pred2.jsonl"));
        p << R"({"id": "a", "path": "pred_half.f32"})" << "\n";
        p.close();
        EvaluateConventions half;
        half.half_res = true;
        const EvaluateSummary ev2 =
            run_evaluate(ws.out("pred2.jsonl"), ws.out("truth.jsonl"), half);
        REQUIRE(ev2.evaluated == 1);
        CHECK(ev2.pairs[0].report.n_pixels == 256);
    }
}

TEST_CASE("exact-scatter flag agrees with the fast path on a constant-depth scene") {
    Workspace ws;
    // constant depth: one effective bin, so exact and fast must coincide
    std::ofstream manifest(ws.in("manifest.jsonl"));
    save_rgb16(random_image(32, 32, 500), ws.in("c_rgb.png"));
    save_depth_png16(DepthMap(32, 32, 2.0), ws.in("c_d.png"), 0.001);
    manifest << R"({"id": "c", "clean": "c_rgb.png", "depth": "c_d.png"})" << "\n";
    manifest.close();

    nlohmann::json j = ws.base_config(ws.in("manifest.jsonl"), "out_fast");
    j["model"] = "scatter";
    const GenerateSummary fast = run_generate(PipelineConfig::from_json(j));
    j["output_dir"] = ws.out("out_exact");
    j["exact_scatter"] = true;
    const GenerateSummary exact = run_generate(PipelineConfig::from_json(j));
    REQUIRE(fast.failures == 0);
    REQUIRE(exact.failures == 0);

    const ImagePlane a = load_rgb(ws.resolve("out_fast", fast.records[0], "degraded"));
    const ImagePlane b = load_rgb(ws.resolve("out_exact", exact.records[0], "degraded"));
    // 1e-5 agreement plus one 16-bit quantization step on either side
    CHECK(max_abs_diff(a, b) <= 1e-5f + 2.0f / 65535.0f);
}

TEST_CASE("mismatched RGB/depth dimensions fail the sample before any compute") {
    Workspace ws;
    std::ofstream manifest(ws.in("manifest.jsonl"));
    save_rgb16(random_image(24, 24, 600), ws.in("m_rgb.png"));
    save_depth_png16(DepthMap(16, 16, 2.0), ws.in("m_d.png"), 0.001);
    manifest << R"({"id": "m", "clean": "m_rgb.png", "depth": "m_d.png"})" << "\n";
    manifest.close();

    const PipelineConfig cfg =
        PipelineConfig::from_json(ws.base_config(ws.in("manifest.jsonl"), "out_mismatch"));
    const GenerateSummary summary = run_generate(cfg);
    CHECK(summary.failures == 1);
    CHECK(summary.records[0].status == "failure");
    CHECK(summary.records[0].error.find("mismatch") != std::string::npos);
}

TEST_CASE("straight-path semantics swap which term the likelihood weights") {
    Workspace ws;
    const std::string manifest = ws.make_inputs(1);
    nlohmann::json j = ws.base_config(manifest, "out_verbatim");
    j["model"] = "scatter";
    const GenerateSummary verbatim = run_generate(PipelineConfig::from_json(j));
    j["output_dir"] = ws.out("out_prose");
    j["straight_path_semantics"] = true;
    const GenerateSummary prose = run_generate(PipelineConfig::from_json(j));
    REQUIRE(verbatim.failures == 0);
    REQUIRE(prose.failures == 0);
    const ImagePlane a = load_rgb(ws.resolve("out_verbatim", verbatim.records[0], "degraded"));
    const ImagePlane b = load_rgb(ws.resolve("out_prose", prose.records[0], "degraded"));
    CHECK(max_abs_diff(a, b) > 1e-3f); // genuinely different readings
}

TEST_CASE("classic model at vanishing optical depth returns the clean image") {
    Workspace ws;
    std::ofstream manifest(ws.in("manifest.jsonl"));
    const ImagePlane clean = random_image(24, 24, 700);
    save_rgb16(clean, ws.in("t1_rgb.png"));
    save_depth_png16(DepthMap(24, 24, 0.4), ws.in("t1_d.png"), 0.001);
    manifest << R"({"id": "t1", "clean": "t1_rgb.png", "depth": "t1_d.png"})" << "\n";
    manifest.close();

    nlohmann::json j = ws.base_config(ws.in("manifest.jsonl"), "out_t1");
    j["model"] = "classic";
    j["water"] = {{"beta", {1e-9, 1e-9, 1e-9}}, {"veiling", {0.9, 0.9, 0.9}}};
    // depth is clipped to the 0.4 floor, so beta*z ~ 4e-10 and t ~ 1
    const GenerateSummary summary = run_generate(PipelineConfig::from_json(j));
    REQUIRE(summary.failures == 0);
    const ImagePlane degraded = load_rgb(ws.resolve("out_t1", summary.records[0], "degraded"));
    CHECK(max_abs_diff(degraded, clean) <= 1.5f / 65535.0f);
}
