#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "vts/detector.hpp"
#include "vts/kernels.hpp"
#include "vts/metrics.hpp"
#include "vts/objectives.hpp"
#include "vts/quality.hpp"
#include "vts/tracker.hpp"

namespace vts {

/// Input and output locations. Relative paths in a config file resolve against the
/// directory holding that file. Empty means "not supplied".
struct RunPaths {
    std::filesystem::path frames;        ///< directory of features/conf/geom grids
    std::filesystem::path flows;         ///< directory of flow fields; empty = zero flow
    std::filesystem::path transform;     ///< JSON feature-transform parameters; empty = identity
    std::filesystem::path observations;  ///< observations JSONL
    std::filesystem::path detections;
    std::filesystem::path gt;
    std::filesystem::path streams;
    std::filesystem::path decisions;
    std::filesystem::path manifest;
    std::filesystem::path student;   ///< fitted student model JSON
    std::filesystem::path scenario;  ///< simulation spec JSON
    std::filesystem::path out = ".";
};

struct RunConfig {
    int window_n = 1;
    detector::DetectorConfig detector;
    double bn_eps = 1e-5;
    tracker::TrackerConfig tracker;
    objectives::LossWeights weights;
    quality::SelectionPolicy policy = quality::SelectionPolicy::TR;
    metrics::MatchingConfig matching;
    quality::RecommenderConfig recommender;
    std::uint64_t seed = 1;
    int flow_window = 2;  ///< how many flow files per side `sim` writes
    RunPaths paths;

    void validate() const;
};

/// Parses a JSON config over the defaults. Unknown keys, wrong types and out-of-range
/// values raise ContractError.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);
[[nodiscard]] std::string run_config_to_json(const RunConfig& cfg);

/// Reads {weight, bias, bn_scale, bn_shift, bn_mean, bn_var[, bn_eps]} from JSON.
[[nodiscard]] TransformParams parse_transform(const std::string& json_text);

}  // namespace vts
