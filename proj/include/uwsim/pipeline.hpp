#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uwsim/metrics.hpp"
#include "uwsim/scatter.hpp"
#include "uwsim/turbidity.hpp"
#include "uwsim/water.hpp"

namespace uwsim {

enum class DegradeModel { Classic, Scatter, ScatterTurbidity };

struct DepthConventions {
    double scale = 0.001; // meters per raw unit (16-bit PNG in millimeters)
    double clip_min = 0.4;
    double clip_max = 10.0;
    bool half_resolution = false; // 2x2 box-average inputs before simulating
};

/// Full description of a generation run. Parsed from a single JSON document;
/// see from_json for the schema and accepted keys.
struct PipelineConfig {
    std::string input_manifest;
    std::string output_dir;
    DegradeModel model = DegradeModel::Classic;
    WaterProfile water = jerlov_preset("I");
    ScatterParams scatter;
    TurbidityParams turbidity;
    std::uint64_t seed = 0;
    DepthConventions depth;
    int bins = 8;
    BinStrategy bin_strategy = BinStrategy::Uniform;
    bool exact_scatter = false;
    bool clamp_export = true;   // false: out-of-range export values are an error
    bool srgb_input = false;    // decode inputs through the sRGB transfer curve
    bool straight_path_semantics = false; // swap which term exp(-alpha z) weights
    bool residual_png = false;  // also export the residual as an affine-mapped PNG
    int threads = 1;

    static PipelineConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct SampleRecord {
    std::string id;
    std::uint64_t stream_id = 0;
    std::string status; // "success" | "failure"
    std::string error;
    std::map<std::string, std::string> outputs; // name -> path
    std::map<std::string, std::string> hashes;  // name -> "fnv1a64:..."

    nlohmann::json to_json() const;
};

struct GenerateSummary {
    std::vector<SampleRecord> records;
    int failures = 0;
    std::string manifest_path;
};

/// Runs the configured degradation over every manifest row. Per-sample
/// failures are recorded and the run continues; output bytes and manifest
/// order depend only on (config, seed), never on scheduling.
GenerateSummary run_generate(const PipelineConfig& config);

struct EvaluateConventions {
    bool half_res = false; // box-average the truth before comparing
    std::optional<std::pair<double, double>> depth_cap; // clamp both planes
    std::string pred_key = "degraded";
    std::string truth_key = "degraded";
};

struct PairResult {
    std::string id;
    bool ok = false;
    MetricsReport report;
    std::string error;
};

struct EvaluateSummary {
    std::vector<PairResult> pairs;
    MetricsReport aggregate; // unweighted mean over successful pairs
    int evaluated = 0;
    int failed = 0;
};

EvaluateSummary run_evaluate(const std::string& pred_manifest,
                             const std::string& truth_manifest,
                             const EvaluateConventions& conventions);

/// A file loaded for comparison: an RGB image or a single raw-valued plane.
/// ".f32" files pick by stored plane count; PNGs load RGB when 3-channel,
/// otherwise as a raw 16-bit plane (no scale, no clip).
struct EvalPlane {
    std::optional<ImagePlane> image;
    std::optional<DepthMap> depth;
};
EvalPlane load_eval_plane(const std::string& path);

} // namespace uwsim
