#include "vts/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "vts/detector.hpp"
#include "vts/errors.hpp"
#include "vts/io.hpp"
#include "vts/kernels.hpp"
#include "vts/providers.hpp"
#include "vts/quality.hpp"
#include "vts/tracker.hpp"

namespace vts::pipeline {

namespace fs = std::filesystem;

namespace {

const fs::path& require_path(const fs::path& p, const char* key) {
    if (p.empty()) throw MissingInputError(std::string("<paths.") + key + " not set>");
    return p;
}

std::istringstream open_text(const fs::path& p) {
    return std::istringstream(io::read_text_file(p));
}

std::vector<GroundTruthRecord> load_gt(const fs::path& p) {
    auto in = open_text(p);
    return io::parse_annotations(in);
}

std::vector<Detection> load_detections(const fs::path& p) {
    auto in = open_text(p);
    return io::parse_detections(in);
}

std::vector<RegionObservation> load_observations(const fs::path& p) {
    auto in = open_text(p);
    return io::parse_observations(in);
}

long manifest_count(const std::map<std::string, std::string>& kv, const std::string& key, const fs::path& file) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(file.string() + ": manifest lacks '" + key + "'", 0);
    long v = 0;
    const auto& s = it->second;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || v < 0) {
        throw ParseError(file.string() + ": manifest value of '" + key + "' is not a count", 0);
    }
    return v;
}

}  // namespace

void apply_thread_env() {
    const char* env = std::getenv("VTS_THREADS");
    if (env == nullptr || *env == '\0') return;
    int n = 0;
    const std::string_view s(env);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || end != s.data() + s.size() || n < 1) {
        throw ContractError("VTS_THREADS must be a positive integer, got '" + std::string(s) + "'");
    }
    set_worker_threads(n);
}

DetectResult cmd_detect(const RunConfig& cfg, std::ostream& log) {
    const DirectoryFrameProvider frames(require_path(cfg.paths.frames, "frames"));
    std::unique_ptr<FlowProvider> flows;
    if (cfg.paths.flows.empty()) {
        flows = std::make_unique<ZeroFlowProvider>();
    } else {
        if (!fs::is_directory(cfg.paths.flows)) throw MissingInputError(cfg.paths.flows.string());
        flows = std::make_unique<FileFlowProvider>(cfg.paths.flows);
    }

    DetectResult r;
    r.per_frame.assign(std::size_t(frames.frame_count()), 0);
    if (frames.frame_count() > 0) {
        const TransformParams transform = cfg.paths.transform.empty()
                                              ? TransformParams::identity(frames.features(0).channels(), cfg.bn_eps)
                                              : parse_transform(io::read_text_file(cfg.paths.transform));
        r.detections = detector::detect_video(frames, *flows, cfg.window_n, transform, cfg.detector);
    }
    for (const auto& d : r.detections) ++r.per_frame[std::size_t(d.frame)];
    for (std::size_t t = 0; t < r.per_frame.size(); ++t) log << "frame " << t << ": " << r.per_frame[t] << " detections\n";
    log << "total: " << r.detections.size() << " detections in " << r.per_frame.size() << " frames\n";

    fs::create_directories(cfg.paths.out);
    io::write_file_atomic(cfg.paths.out / "detections.tsv", io::format_detections(r.detections));
    return r;
}

std::map<int, std::string> stream_transcripts(std::span<const TextStream> streams,
                                              std::span<const GroundTruthRecord> gt, double iou_threshold) {
    std::map<int, std::vector<const GroundTruthRecord*>> by_frame;
    for (const auto& g : gt) by_frame[g.frame].push_back(&g);

    std::map<int, std::string> out;
    for (const auto& s : streams) {
        std::map<int, int> votes;
        std::map<int, const GroundTruthRecord*> rec;
        for (const auto& o : s.observations) {
            const auto it = by_frame.find(o.frame);
            if (it == by_frame.end()) continue;
            const GroundTruthRecord* best = nullptr;
            double best_iou = iou_threshold;
            for (const auto* g : it->second) {
                const double v = polygon_iou(o.quad, g->quad);
                if (v >= best_iou && (best == nullptr || v > best_iou || g->id < best->id)) {
                    best = g;
                    best_iou = v;
                }
            }
            if (best != nullptr) {
                ++votes[best->id];
                rec.try_emplace(best->id, best);
            }
        }
        int best_id = 0;
        int best_votes = 0;
        for (const auto& [id, n] : votes) {
            if (n > best_votes) {
                best_id = id;
                best_votes = n;
            }
        }
        if (best_votes > 0) out[s.id] = rec.at(best_id)->transcript;
    }
    return out;
}

std::vector<RegionObservation> gate_by_detections(std::span<const RegionObservation> obs,
                                                  std::span<const Detection> dets, double iou_threshold) {
    std::map<int, std::vector<const Quad*>> by_frame;
    for (const auto& d : dets) by_frame[d.frame].push_back(&d.region.quad);
    std::vector<RegionObservation> out;
    for (const auto& o : obs) {
        const auto it = by_frame.find(o.frame);
        if (it == by_frame.end()) continue;
        const bool hit = std::any_of(it->second.begin(), it->second.end(),
                                     [&](const Quad* q) { return polygon_iou(o.quad, *q) >= iou_threshold; });
        if (hit) out.push_back(o);
    }
    return out;
}

SpotResult spot(std::span<const RegionObservation> observations, std::span<const GroundTruthRecord> gt,
                const RunConfig& cfg, const quality::RidgeStudent* student, quality::RidgeStudent* fitted,
                std::ostream& log) {
    auto tracked = tracker::track(observations, cfg.tracker);
    for (const auto& rj : tracked.rejected) log << "rejected observation " << rj.input_index << ": " << rj.reason << '\n';

    SpotResult r;
    r.streams = std::move(tracked.streams);

    if (!gt.empty()) {
        const auto transcripts = stream_transcripts(r.streams, gt, cfg.matching.iou_threshold);
        for (auto& s : r.streams) {
            const auto it = transcripts.find(s.id);
            const auto teacher = quality::teacher_scores(s, it == transcripts.end() ? std::string() : it->second,
                                                         cfg.recommender);
            for (std::size_t i = 0; i < s.observations.size(); ++i) s.observations[i].teacher_score = teacher.scores[i];
        }
    }

    quality::RidgeStudent local;
    if (student == nullptr && cfg.policy == quality::SelectionPolicy::TR) {
        if (gt.empty()) throw PolicyUnavailableError("policy tr needs a student model or ground truth to fit one");
        std::vector<quality::TrainingSample> samples;
        for (const auto& s : r.streams) {
            for (const auto& o : s.observations) samples.push_back({o.embedding, *o.teacher_score});
        }
        if (!samples.empty()) {
            local = quality::fit_student(samples, cfg.recommender.ridge_lambda);
            student = &local;
            if (fitted != nullptr) *fitted = local;
        }
    }
    if (student != nullptr) {
        for (auto& s : r.streams) {
            for (auto& o : s.observations) o.student_score = student->predict(o);
        }
    }

    for (const auto& s : r.streams) {
        r.decisions.push_back(quality::select(s, cfg.policy));
        r.regions_total += long(s.observations.size());
    }
    r.recognitions_consumed =
        cfg.policy == quality::SelectionPolicy::TR ? long(r.decisions.size()) : r.regions_total;

    const double speedup =
        r.recognitions_consumed > 0 ? metrics::speedup_ratio(r.regions_total, r.recognitions_consumed) : 0.0;
    r.manifest = {
        {"policy", quality::to_string(cfg.policy)},
        {"streams", std::to_string(r.streams.size())},
        {"regions_total", std::to_string(r.regions_total)},
        {"recognitions_consumed", std::to_string(r.recognitions_consumed)},
        {"speedup_ratio", io::format_double(speedup)},
        {"rejected_observations", std::to_string(tracked.rejected.size())},
    };
    return r;
}

SpotResult cmd_spot(const RunConfig& cfg, std::ostream& log) {
    auto observations = load_observations(require_path(cfg.paths.observations, "observations"));
    if (!cfg.paths.detections.empty()) {
        const auto dets = load_detections(cfg.paths.detections);
        const auto before = observations.size();
        observations = gate_by_detections(observations, dets, cfg.matching.iou_threshold);
        log << "kept " << observations.size() << " of " << before << " observations overlapping detections\n";
    }
    std::vector<GroundTruthRecord> gt;
    if (!cfg.paths.gt.empty()) gt = load_gt(cfg.paths.gt);

    std::optional<quality::RidgeStudent> given;
    if (!cfg.paths.student.empty()) given = quality::RidgeStudent::from_json(io::read_text_file(cfg.paths.student));

    quality::RidgeStudent fitted;
    auto r = spot(observations, gt, cfg, given ? &*given : nullptr, &fitted, log);
    r.manifest["student"] = given ? "file" : (fitted.fitted() ? "fitted" : "none");

    fs::create_directories(cfg.paths.out);
    io::write_file_atomic(cfg.paths.out / "streams.tsv", io::format_streams(r.streams));
    io::write_file_atomic(cfg.paths.out / "decisions.tsv", io::format_decisions(r.decisions));
    if (fitted.fitted()) io::write_file_atomic(cfg.paths.out / "student.json", fitted.to_json());
    io::write_file_atomic(cfg.paths.out / "manifest.txt", io::format_key_values(r.manifest));

    log << r.decisions.size() << " streams, " << r.recognitions_consumed << " recognitions for " << r.regions_total
        << " regions (speedup " << r.manifest["speedup_ratio"] << ")\n";
    return r;
}

metrics::EvalReport cmd_eval(const RunConfig& cfg, std::ostream& log) {
    const auto gt = load_gt(require_path(cfg.paths.gt, "gt"));

    std::optional<std::vector<Detection>> dets;
    std::optional<std::vector<TextStream>> streams;
    std::optional<std::vector<StreamDecision>> decisions;
    if (!cfg.paths.detections.empty()) dets = load_detections(cfg.paths.detections);
    if (!cfg.paths.streams.empty()) {
        auto in = open_text(cfg.paths.streams);
        streams = io::streams_from_lines(io::parse_stream_lines(in));
    }
    if (!cfg.paths.decisions.empty()) {
        auto in = open_text(cfg.paths.decisions);
        decisions = io::parse_decisions(in);
    }

    metrics::EvalInputs in;
    in.gt = gt;
    if (dets) in.detections = std::span<const Detection>(*dets);
    if (streams) in.streams = std::span<const TextStream>(*streams);
    if (decisions) in.decisions = std::span<const StreamDecision>(*decisions);
    if (!cfg.paths.manifest.empty()) {
        auto min = open_text(cfg.paths.manifest);
        const auto kv = io::parse_key_values(min);
        in.regions_total = manifest_count(kv, "regions_total", cfg.paths.manifest);
        in.recognitions_consumed = manifest_count(kv, "recognitions_consumed", cfg.paths.manifest);
    }

    const auto report = metrics::evaluate(in, cfg.matching);
    fs::create_directories(cfg.paths.out);
    io::write_file_atomic(cfg.paths.out / "report.txt", report.to_key_values());
    log << report.to_text();
    return report;
}

simkit::Scenario cmd_sim(const RunConfig& cfg, std::ostream& log) {
    simkit::ScenarioSpec spec;
    if (!cfg.paths.scenario.empty()) spec = simkit::spec_from_json(io::read_text_file(cfg.paths.scenario));
    spec.seed = cfg.seed;
    auto scenario = simkit::generate(spec);
    simkit::write_scenario(cfg.paths.out, scenario, cfg.flow_window);
    log << "scenario: " << scenario.transcripts.size() << " streams, " << scenario.n_frames << " frames, "
        << scenario.observations.size() << " observations -> " << cfg.paths.out.string() << '\n';
    return scenario;
}

}  // namespace vts::pipeline
