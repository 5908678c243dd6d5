#include "vts/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "vts/assignment.hpp"
#include "vts/errors.hpp"
#include "vts/io.hpp"

namespace vts::metrics {

void MatchingConfig::validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw ContractError("matching: iou_threshold must lie in (0,1)");
}

bool transcripts_match(const std::string& a, const std::string& b, TranscriptMatch mode) {
    if (mode == TranscriptMatch::Exact) return a == b;
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

double ratio(double num, double den) noexcept {
    return den == 0.0 ? 0.0 : num / den;
}

double harmonic(double p, double r) noexcept {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

namespace {

using FrameIndex = std::map<int, std::vector<const GroundTruthRecord*>>;

FrameIndex gt_by_frame(std::span<const GroundTruthRecord> gt) {
    FrameIndex idx;
    for (const auto& r : gt) idx[r.frame].push_back(&r);
    return idx;
}

const GroundTruthRecord* record_at(std::span<const GroundTruthRecord> gt, int id, int frame) {
    for (const auto& r : gt) {
        if (r.id == id && r.frame == frame) return &r;
    }
    return nullptr;
}

}  // namespace

std::map<int, std::vector<GroundTruthRecord>> gt_streams(std::span<const GroundTruthRecord> gt) {
    std::map<int, std::vector<GroundTruthRecord>> out;
    for (const auto& r : gt) out[r.id].push_back(r);
    for (auto& [id, v] : out) {
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.frame < b.frame; });
    }
    return out;
}

// ---- detection ----

DetectionCounts& DetectionCounts::operator+=(const DetectionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

PRF DetectionCounts::rates() const {
    PRF r;
    r.precision = ratio(double(tp), double(tp + fp));
    r.recall = ratio(double(tp), double(tp + fn));
    r.f = harmonic(r.precision, r.recall);
    return r;
}

DetectionCounts detection_counts(std::span<const Detection> dets, std::span<const GroundTruthRecord> gt,
                                 const MatchingConfig& cfg) {
    cfg.validate();
    const auto gt_idx = gt_by_frame(gt);
    std::map<int, std::vector<const Detection*>> det_idx;
    for (const auto& d : dets) det_idx[d.frame].push_back(&d);

    std::set<int> frames;
    for (const auto& [f, v] : gt_idx) frames.insert(f);
    for (const auto& [f, v] : det_idx) frames.insert(f);

    DetectionCounts c;
    for (int f : frames) {
        const auto git = gt_idx.find(f);
        const auto dit = det_idx.find(f);
        const std::size_t ng = git == gt_idx.end() ? 0 : git->second.size();
        const std::size_t nd = dit == det_idx.end() ? 0 : dit->second.size();
        struct Cand {
            double iou;
            std::size_t d, g;
        };
        std::vector<Cand> cands;
        for (std::size_t d = 0; d < nd; ++d) {
            for (std::size_t g = 0; g < ng; ++g) {
                const double iou = polygon_iou(dit->second[d]->region.quad, git->second[g]->quad);
                if (iou >= cfg.iou_threshold) cands.push_back({iou, d, g});
            }
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.iou > b.iou; });
        std::vector<char> dused(nd, 0);
        std::vector<char> gused(ng, 0);
        long tp = 0;
        for (const auto& cd : cands) {
            if (dused[cd.d] || gused[cd.g]) continue;
            dused[cd.d] = gused[cd.g] = 1;
            ++tp;
        }
        c.tp += tp;
        c.fp += long(nd) - tp;
        c.fn += long(ng) - tp;
    }
    return c;
}

PRF detection_prf(std::span<const Detection> dets, std::span<const GroundTruthRecord> gt, const MatchingConfig& cfg) {
    return detection_counts(dets, gt, cfg).rates();
}

// ---- tracking ----

TrackingCounts& TrackingCounts::operator+=(const TrackingCounts& o) {
    matches += o.matches;
    iou_sum += o.iou_sum;
    fp += o.fp;
    fn += o.fn;
    id_switches += o.id_switches;
    gt_objects += o.gt_objects;
    ata_overlap_sum += o.ata_overlap_sum;
    gt_streams += o.gt_streams;
    pred_streams += o.pred_streams;
    return *this;
}

TrackingScores tracking_scores(const TrackingCounts& c) {
    TrackingScores s;
    s.motp = ratio(c.iou_sum, double(c.matches));
    s.mota = c.gt_objects == 0 ? 0.0 : 1.0 - double(c.fn + c.fp + c.id_switches) / double(c.gt_objects);
    s.ata = ratio(c.ata_overlap_sum, 0.5 * double(c.gt_streams + c.pred_streams));
    return s;
}

TrackingCounts tracking_counts(std::span<const TextStream> pred, std::span<const GroundTruthRecord> gt,
                               const MatchingConfig& cfg) {
    cfg.validate();
    struct PredObs {
        int id;
        const Quad* quad;
    };
    std::map<int, std::vector<PredObs>> pred_idx;
    for (const auto& s : pred) {
        for (const auto& o : s.observations) pred_idx[o.frame].push_back({s.id, &o.quad});
    }
    const auto gt_idx = gt_by_frame(gt);
    std::set<int> frames;
    for (const auto& [f, v] : gt_idx) frames.insert(f);
    for (const auto& [f, v] : pred_idx) frames.insert(f);

    TrackingCounts c;
    std::map<int, int> last_match;  // gt id -> pred id
    for (int f : frames) {
        static const std::vector<const GroundTruthRecord*> kNoGt;
        static const std::vector<PredObs> kNoPred;
        const auto& g = gt_idx.count(f) ? gt_idx.at(f) : kNoGt;
        const auto& p = pred_idx.count(f) ? pred_idx.at(f) : kNoPred;
        std::vector<char> gused(g.size(), 0);
        std::vector<char> pused(p.size(), 0);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;

        // Keep last frame's correspondences that are still valid.
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            const auto it = last_match.find(g[gi]->id);
            if (it == last_match.end()) continue;
            for (std::size_t pi = 0; pi < p.size(); ++pi) {
                if (pused[pi] || p[pi].id != it->second) continue;
                if (polygon_iou(g[gi]->quad, *p[pi].quad) >= cfg.iou_threshold) {
                    gused[gi] = pused[pi] = 1;
                    pairs.emplace_back(gi, pi);
                }
                break;
            }
        }

        std::vector<std::size_t> grem;
        std::vector<std::size_t> prem;
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            if (!gused[gi]) grem.push_back(gi);
        }
        for (std::size_t pi = 0; pi < p.size(); ++pi) {
            if (!pused[pi]) prem.push_back(pi);
        }
        CostMatrix cost(grem.size(), prem.size(), kForbiddenCost);
        for (std::size_t a = 0; a < grem.size(); ++a) {
            for (std::size_t b = 0; b < prem.size(); ++b) {
                const double iou = polygon_iou(g[grem[a]]->quad, *p[prem[b]].quad);
                if (iou >= cfg.iou_threshold) cost(a, b) = 1.0 - iou;
            }
        }
        for (const auto& [a, b] : assign(cost)) pairs.emplace_back(grem[a], prem[b]);

        for (const auto& [gi, pi] : pairs) {
            const int gid = g[gi]->id;
            const int pid = p[pi].id;
            const auto it = last_match.find(gid);
            if (it != last_match.end() && it->second != pid) ++c.id_switches;
            last_match[gid] = pid;
            c.iou_sum += polygon_iou(g[gi]->quad, *p[pi].quad);
            ++c.matches;
        }
        c.gt_objects += long(g.size());
        c.fn += long(g.size() - pairs.size());
        c.fp += long(p.size() - pairs.size());
    }

    // ATA: optimal one-to-one stream pairing by temporal overlap ratio.
    const auto gs = gt_streams(gt);
    std::vector<int> gids;
    for (const auto& [id, v] : gs) gids.push_back(id);
    c.gt_streams = long(gs.size());
    c.pred_streams = long(pred.size());
    CostMatrix cost(gids.size(), pred.size(), kForbiddenCost);
    std::vector<double> overlap(gids.size() * pred.size(), 0.0);
    for (std::size_t a = 0; a < gids.size(); ++a) {
        const auto& grecs = gs.at(gids[a]);
        for (std::size_t b = 0; b < pred.size(); ++b) {
            std::map<int, const Quad*> pf;
            for (const auto& o : pred[b].observations) pf[o.frame] = &o.quad;
            std::set<int> uni;
            long both = 0;
            for (const auto& r : grecs) {
                uni.insert(r.frame);
                const auto it = pf.find(r.frame);
                if (it != pf.end() && polygon_iou(r.quad, *it->second) >= cfg.iou_threshold) ++both;
            }
            for (const auto& [f, q] : pf) uni.insert(f);
            const double ov = ratio(double(both), double(uni.size()));
            overlap[a * pred.size() + b] = ov;
            if (ov > 0.0) cost(a, b) = 1.0 - ov;
        }
    }
    for (const auto& [a, b] : assign(cost)) c.ata_overlap_sum += overlap[a * pred.size() + b];
    return c;
}

TrackingScores tracking_metrics(std::span<const TextStream> pred, std::span<const GroundTruthRecord> gt,
                                const MatchingConfig& cfg) {
    return tracking_scores(tracking_counts(pred, gt, cfg));
}

// ---- selection ----

SelectionCounts& SelectionCounts::operator+=(const SelectionCounts& o) {
    qshr_hits += o.qshr_hits;
    qshr_streams += o.qshr_streams;
    qshr_excluded += o.qshr_excluded;
    rcr_hits += o.rcr_hits;
    rcr_streams += o.rcr_streams;
    unmatched_decisions += o.unmatched_decisions;
    return *this;
}

std::optional<int> map_decision(const StreamDecision& d, std::span<const GroundTruthRecord> gt,
                                const MatchingConfig& cfg) {
    std::optional<int> best;
    double best_iou = -1.0;
    for (const auto& r : gt) {
        if (r.frame != d.chosen_frame) continue;
        const double iou = polygon_iou(r.quad, d.chosen_quad);
        if (iou < cfg.iou_threshold) continue;
        if (iou > best_iou || (iou == best_iou && r.id < *best)) {
            best_iou = iou;
            best = r.id;
        }
    }
    return best;
}

SelectionCounts selection_counts(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
                                 const MatchingConfig& cfg) {
    cfg.validate();
    const auto gs = gt_streams(gt);
    SelectionCounts c;
    for (const auto& d : decisions) {
        const auto gid = map_decision(d, gt, cfg);
        if (!gid) {
            // Selection hit no annotated text: a miss for both rates.
            ++c.unmatched_decisions;
            ++c.qshr_streams;
            ++c.rcr_streams;
            continue;
        }
        const auto& recs = gs.at(*gid);
        const bool has_high =
            std::any_of(recs.begin(), recs.end(), [](const auto& r) { return r.quality == Quality::High; });
        if (has_high) {
            ++c.qshr_streams;
            if (record_at(gt, *gid, d.chosen_frame)->quality == Quality::High) ++c.qshr_hits;
        } else {
            ++c.qshr_excluded;
        }
        ++c.rcr_streams;
        if (transcripts_match(d.final_text, recs.front().transcript, cfg.transcript_match)) ++c.rcr_hits;
    }
    return c;
}

double qshr(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
            const MatchingConfig& cfg) {
    const auto c = selection_counts(decisions, gt, cfg);
    return ratio(double(c.qshr_hits), double(c.qshr_streams));
}

double rcr(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
           const MatchingConfig& cfg) {
    const auto c = selection_counts(decisions, gt, cfg);
    return ratio(double(c.rcr_hits), double(c.rcr_streams));
}

// ---- end to end ----

EndToEndCounts& EndToEndCounts::operator+=(const EndToEndCounts& o) {
    n_r += o.n_r;
    n_g += o.n_g;
    n_d += o.n_d;
    return *this;
}

PRF EndToEndCounts::rates() const {
    PRF r;
    r.precision = ratio(double(n_r), double(n_d));
    r.recall = ratio(double(n_r), double(n_g));
    r.f = harmonic(r.precision, r.recall);
    return r;
}

bool recalls(const StreamDecision& d, int gt_id, std::span<const GroundTruthRecord> gt, const MatchingConfig& cfg) {
    int start = 0;
    int end = -1;
    bool any = false;
    const GroundTruthRecord* at = nullptr;
    for (const auto& r : gt) {
        if (r.id != gt_id) continue;
        if (!any) {
            start = end = r.frame;
            any = true;
        }
        start = std::min(start, r.frame);
        end = std::max(end, r.frame);
        if (r.frame == d.chosen_frame) at = &r;
    }
    if (!any || at == nullptr) return false;
    if (!transcripts_match(d.final_text, at->transcript, cfg.transcript_match)) return false;
    if (d.chosen_frame < start || d.chosen_frame > end) return false;
    return polygon_iou(at->quad, d.chosen_quad) >= cfg.iou_threshold;
}

namespace {

bool augment(std::size_t d, const std::vector<std::vector<std::size_t>>& adj, std::vector<char>& seen,
             std::vector<long>& owner) {
    for (std::size_t g : adj[d]) {
        if (seen[g]) continue;
        seen[g] = 1;
        if (owner[g] < 0 || augment(std::size_t(owner[g]), adj, seen, owner)) {
            owner[g] = long(d);
            return true;
        }
    }
    return false;
}

}  // namespace

EndToEndCounts end_to_end_counts(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
                                 const MatchingConfig& cfg) {
    cfg.validate();
    const auto gs = gt_streams(gt);
    std::vector<int> gids;
    for (const auto& [id, v] : gs) gids.push_back(id);

    std::vector<std::size_t> order(decisions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return decisions[a].stream_id < decisions[b].stream_id; });

    std::vector<std::vector<std::size_t>> adj(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (std::size_t g = 0; g < gids.size(); ++g) {
            if (recalls(decisions[order[k]], gids[g], gt, cfg)) adj[k].push_back(g);
        }
    }
    std::vector<long> owner(gids.size(), -1);
    EndToEndCounts c;
    for (std::size_t k = 0; k < order.size(); ++k) {
        std::vector<char> seen(gids.size(), 0);
        if (augment(k, adj, seen, owner)) ++c.n_r;
    }
    c.n_g = long(gids.size());
    c.n_d = long(decisions.size());
    return c;
}

PRF end_to_end(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
               const MatchingConfig& cfg) {
    return end_to_end_counts(decisions, gt, cfg).rates();
}

double speedup_ratio(long regions_total, long recognitions_consumed) {
    if (recognitions_consumed < 1) throw ContractError("speedup_ratio: recognitions_consumed must be at least 1");
    return double(regions_total) / double(recognitions_consumed);
}

// ---- report ----

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
    detection += o.detection;
    tracking += o.tracking;
    selection += o.selection;
    end_to_end += o.end_to_end;
    recognitions_consumed += o.recognitions_consumed;
    regions_total += o.regions_total;
    return *this;
}

EvalReport EvalReport::from_counts(const EvalCounts& c) {
    EvalReport r;
    r.counts = c;
    const auto det = c.detection.rates();
    r.det_precision = det.precision;
    r.det_recall = det.recall;
    r.det_f = det.f;
    const auto tr = tracking_scores(c.tracking);
    r.motp = tr.motp;
    r.mota = tr.mota;
    r.ata = tr.ata;
    r.qshr = ratio(double(c.selection.qshr_hits), double(c.selection.qshr_streams));
    r.rcr = ratio(double(c.selection.rcr_hits), double(c.selection.rcr_streams));
    const auto e2e = c.end_to_end.rates();
    r.pre_s = e2e.precision;
    r.rec_s = e2e.recall;
    r.f_score = e2e.f;
    r.speedup = c.recognitions_consumed > 0 ? speedup_ratio(c.regions_total, c.recognitions_consumed) : 0.0;
    return r;
}

std::string EvalReport::to_key_values() const {
    const auto f = [](double v) { return io::format_double(v); };
    const auto& k = counts;
    std::string s;
    const auto line = [&](const char* key, const std::string& v) { s += std::string(key) + '=' + v + '\n'; };
    line("det_precision", f(det_precision));
    line("det_recall", f(det_recall));
    line("det_f", f(det_f));
    line("motp", f(motp));
    line("mota", f(mota));
    line("ata", f(ata));
    line("qshr", f(qshr));
    line("rcr", f(rcr));
    line("pre_s", f(pre_s));
    line("rec_s", f(rec_s));
    line("f_score", f(f_score));
    line("speedup", f(speedup));
    line("det_tp", std::to_string(k.detection.tp));
    line("det_fp", std::to_string(k.detection.fp));
    line("det_fn", std::to_string(k.detection.fn));
    line("track_matches", std::to_string(k.tracking.matches));
    line("track_fp", std::to_string(k.tracking.fp));
    line("track_fn", std::to_string(k.tracking.fn));
    line("track_id_switches", std::to_string(k.tracking.id_switches));
    line("track_gt_objects", std::to_string(k.tracking.gt_objects));
    line("qshr_streams", std::to_string(k.selection.qshr_streams));
    line("qshr_excluded", std::to_string(k.selection.qshr_excluded));
    line("rcr_streams", std::to_string(k.selection.rcr_streams));
    line("unmatched_decisions", std::to_string(k.selection.unmatched_decisions));
    line("n_r", std::to_string(k.end_to_end.n_r));
    line("n_g", std::to_string(k.end_to_end.n_g));
    line("n_d", std::to_string(k.end_to_end.n_d));
    line("recognitions_consumed", std::to_string(k.recognitions_consumed));
    line("regions_total", std::to_string(k.regions_total));
    return s;
}

std::string EvalReport::to_text() const {
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "Detection   PRE %.4f  REC %.4f  F %.4f\n"
                  "Tracking    MOTP %.4f  MOTA %.4f  ATA %.4f\n"
                  "Selection   QSHR %.4f  RCR %.4f  (%ld streams without a high-quality frame excluded)\n"
                  "End-to-end  PRE_s %.4f  REC_s %.4f  F-score %.4f  (N_r %ld, N_g %ld, N_d %ld)\n"
                  "Recognition %ld calls for %ld regions, speedup %.2fx\n",
                  det_precision, det_recall, det_f, motp, mota, ata, qshr, rcr, counts.selection.qshr_excluded, pre_s,
                  rec_s, f_score, counts.end_to_end.n_r, counts.end_to_end.n_g, counts.end_to_end.n_d,
                  counts.recognitions_consumed, counts.regions_total, speedup);
    return buf;
}

EvalCounts evaluate_counts(const EvalInputs& in, const MatchingConfig& cfg) {
    EvalCounts c;
    if (in.detections) c.detection = detection_counts(*in.detections, in.gt, cfg);
    if (in.streams) c.tracking = tracking_counts(*in.streams, in.gt, cfg);
    if (in.decisions) {
        c.selection = selection_counts(*in.decisions, in.gt, cfg);
        c.end_to_end = end_to_end_counts(*in.decisions, in.gt, cfg);
    } else {
        c.end_to_end.n_g = long(gt_streams(in.gt).size());
    }
    c.recognitions_consumed = in.recognitions_consumed;
    c.regions_total = in.regions_total;
    return c;
}

EvalReport evaluate(const EvalInputs& in, const MatchingConfig& cfg) {
    return EvalReport::from_counts(evaluate_counts(in, cfg));
}

}  // namespace vts::metrics
