#include "vts/config.hpp"

#include <json.hpp>

#include "vts/errors.hpp"
#include "vts/io.hpp"

namespace vts {

using nlohmann::json;

void RunConfig::validate() const {
    if (window_n < 0) throw ContractError("config: window_n must be non-negative");
    const auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
    if (!(detector.mask_threshold >= 0.0 && detector.mask_threshold <= 1.0)) {
        throw ContractError("config: mask_threshold must lie in [0,1]");
    }
    if (!unit_open(detector.nms_threshold)) throw ContractError("config: nms_threshold must lie in (0,1)");
    if (!(detector.conf_threshold >= 0.0 && detector.conf_threshold <= 1.0)) {
        throw ContractError("config: conf_threshold must lie in [0,1]");
    }
    if (!(detector.cell_stride > 0.0)) throw ContractError("config: cell_stride must be positive");
    if (!(bn_eps > 0.0)) throw ContractError("config: bn_eps must be positive");
    if (recommender.k_clusters < 1) throw ContractError("config: recommender.k_clusters must be at least 1");
    if (recommender.t_max < 1) throw ContractError("config: recommender.t_max must be at least 1");
    if (!(recommender.ridge_lambda >= 0.0)) throw ContractError("config: recommender.ridge_lambda must be >= 0");
    if (flow_window < 0) throw ContractError("config: flow_window must be non-negative");
    tracker.validate();
    weights.validate();
    matching.validate();
}

namespace {

json defaults_json(const RunConfig& c) {
    const auto p = [](const std::filesystem::path& x) { return x.string(); };
    return {
        {"window_n", c.window_n},
        {"mask_threshold", c.detector.mask_threshold},
        {"nms_threshold", c.detector.nms_threshold},
        {"conf_threshold", c.detector.conf_threshold},
        {"cell_stride", c.detector.cell_stride},
        {"bn_eps", c.bn_eps},
        {"tracker",
         {{"mc_epsilon", c.tracker.mc_epsilon},
          {"similarity_threshold", c.tracker.similarity_threshold},
          {"max_gap", c.tracker.max_gap},
          {"embedding_dim", c.tracker.embedding_dim},
          {"use_mean_embedding", c.tracker.use_mean_embedding}}},
        {"weights",
         {{"lambda_t", c.weights.lambda_t},
          {"lambda1", c.weights.lambda1},
          {"lambda2", c.weights.lambda2},
          {"lambda3", c.weights.lambda3},
          {"margin", c.weights.margin},
          {"contrastive_margin", c.weights.contrastive_margin}}},
        {"policy", quality::to_string(c.policy)},
        {"matching",
         {{"iou_threshold", c.matching.iou_threshold},
          {"transcript_match",
           c.matching.transcript_match == metrics::TranscriptMatch::Exact ? "exact" : "case_insensitive"}}},
        {"recommender",
         {{"k_clusters", c.recommender.k_clusters},
          {"t_max", c.recommender.t_max},
          {"ridge_lambda", c.recommender.ridge_lambda}}},
        {"seed", c.seed},
        {"flow_window", c.flow_window},
        {"paths",
         {{"frames", p(c.paths.frames)},
          {"flows", p(c.paths.flows)},
          {"transform", p(c.paths.transform)},
          {"observations", p(c.paths.observations)},
          {"detections", p(c.paths.detections)},
          {"gt", p(c.paths.gt)},
          {"streams", p(c.paths.streams)},
          {"decisions", p(c.paths.decisions)},
          {"manifest", p(c.paths.manifest)},
          {"student", p(c.paths.student)},
          {"scenario", p(c.paths.scenario)},
          {"out", p(c.paths.out)}}},
    };
}

void overlay(json& target, const json& src, const std::string& where) {
    if (!src.is_object()) throw ContractError("config: " + (where.empty() ? "top level" : where) + " must be an object");
    for (const auto& [key, value] : src.items()) {
        const std::string name = where.empty() ? key : where + "." + key;
        if (!target.contains(key)) throw ContractError("config: unknown key '" + name + "'");
        auto& slot = target[key];
        if (slot.is_object()) {
            overlay(slot, value, name);
            continue;
        }
        const bool ok = (slot.is_number_float() && value.is_number()) ||
                        (slot.is_number_integer() && value.is_number_integer()) ||
                        (slot.is_boolean() && value.is_boolean()) || (slot.is_string() && value.is_string());
        if (!ok) throw ContractError("config: key '" + name + "' has the wrong type");
        slot = value;
    }
}

std::filesystem::path resolve(const std::string& s, const std::filesystem::path& base) {
    if (s.empty()) return {};
    const std::filesystem::path p(s);
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json merged = defaults_json(RunConfig{});
    json user;
    try {
        user = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ContractError(std::string("config: ") + e.what());
    }
    overlay(merged, user, "");

    RunConfig c;
    c.window_n = merged["window_n"].get<int>();
    c.detector.mask_threshold = merged["mask_threshold"].get<double>();
    c.detector.nms_threshold = merged["nms_threshold"].get<double>();
    c.detector.conf_threshold = merged["conf_threshold"].get<double>();
    c.detector.cell_stride = merged["cell_stride"].get<double>();
    c.bn_eps = merged["bn_eps"].get<double>();
    const auto& t = merged["tracker"];
    c.tracker.mc_epsilon = t["mc_epsilon"].get<double>();
    c.tracker.similarity_threshold = t["similarity_threshold"].get<double>();
    c.tracker.max_gap = t["max_gap"].get<int>();
    c.tracker.embedding_dim = t["embedding_dim"].get<int>();
    c.tracker.use_mean_embedding = t["use_mean_embedding"].get<bool>();
    const auto& w = merged["weights"];
    c.weights.lambda_t = w["lambda_t"].get<double>();
    c.weights.lambda1 = w["lambda1"].get<double>();
    c.weights.lambda2 = w["lambda2"].get<double>();
    c.weights.lambda3 = w["lambda3"].get<double>();
    c.weights.margin = w["margin"].get<double>();
    c.weights.contrastive_margin = w["contrastive_margin"].get<double>();
    const auto policy = quality::parse_policy(merged["policy"].get<std::string>());
    if (!policy) throw ContractError("config: policy must be one of tr, pcw, hfp");
    c.policy = *policy;
    const auto& m = merged["matching"];
    c.matching.iou_threshold = m["iou_threshold"].get<double>();
    const auto mode = m["transcript_match"].get<std::string>();
    if (mode == "exact") {
        c.matching.transcript_match = metrics::TranscriptMatch::Exact;
    } else if (mode == "case_insensitive") {
        c.matching.transcript_match = metrics::TranscriptMatch::CaseInsensitive;
    } else {
        throw ContractError("config: matching.transcript_match must be exact or case_insensitive");
    }
    const auto& r = merged["recommender"];
    c.recommender.k_clusters = r["k_clusters"].get<int>();
    c.recommender.t_max = r["t_max"].get<int>();
    c.recommender.ridge_lambda = r["ridge_lambda"].get<double>();
    if (merged["seed"].get<long long>() < 0) throw ContractError("config: seed must be non-negative");
    c.seed = merged["seed"].get<std::uint64_t>();
    c.flow_window = merged["flow_window"].get<int>();
    const auto& p = merged["paths"];
    const auto get = [&](const char* key) { return resolve(p[key].get<std::string>(), base_dir); };
    c.paths.frames = get("frames");
    c.paths.flows = get("flows");
    c.paths.transform = get("transform");
    c.paths.observations = get("observations");
    c.paths.detections = get("detections");
    c.paths.gt = get("gt");
    c.paths.streams = get("streams");
    c.paths.decisions = get("decisions");
    c.paths.manifest = get("manifest");
    c.paths.student = get("student");
    c.paths.scenario = get("scenario");
    c.paths.out = get("out");
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(io::read_text_file(path), path.parent_path());
}

std::string run_config_to_json(const RunConfig& cfg) {
    return defaults_json(cfg).dump(2) + "\n";
}

TransformParams parse_transform(const std::string& json_text) {
    TransformParams p;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ContractError("transform: expected an object");
        for (const auto& [key, value] : j.items()) {
            if (key == "weight") {
                p.weight = value.get<std::vector<double>>();
            } else if (key == "bias") {
                p.bias = value.get<std::vector<double>>();
            } else if (key == "bn_scale") {
                p.bn_scale = value.get<std::vector<double>>();
            } else if (key == "bn_shift") {
                p.bn_shift = value.get<std::vector<double>>();
            } else if (key == "bn_mean") {
                p.bn_mean = value.get<std::vector<double>>();
            } else if (key == "bn_var") {
                p.bn_var = value.get<std::vector<double>>();
            } else if (key == "bn_eps") {
                p.bn_eps = value.get<double>();
            } else {
                throw ContractError("transform: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ContractError(std::string("transform: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace vts
