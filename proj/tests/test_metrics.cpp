#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "vts/errors.hpp"
#include "vts/metrics.hpp"

using namespace vts;
using namespace vts::metrics;

namespace {

Quad box_at(int slot) { return Quad::from_box(10.0 * slot, 0, 10.0 * slot + 8, 4); }

GroundTruthRecord rec(int frame, int id, Quality q = Quality::High, std::string text = "") {
    GroundTruthRecord g;
    g.frame = frame;
    g.id = id;
    g.quad = box_at(id);
    g.quality = q;
    g.transcript = text.empty() ? "T" + std::to_string(id) : std::move(text);
    return g;
}

Detection det(int frame, Quad q) { return Detection{frame, ScoredQuad{q, 0.9}}; }

StreamDecision decide(int stream, int frame, int slot, std::string text) {
    return StreamDecision{stream, frame, box_at(slot), std::move(text), 1.0};
}

TextStream pred_stream(int id, int slot, std::vector<int> frames) {
    TextStream s;
    s.id = id;
    for (int f : frames) {
        RegionObservation o;
        o.frame = f;
        o.quad = box_at(slot);
        s.observations.push_back(o);
    }
    s.last_active_frame = frames.empty() ? 0 : frames.back();
    return s;
}

}  // namespace

TEST_SUITE("detection") {
    TEST_CASE("perfect, empty and mixed") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 0), rec(0, 1)};
        const std::vector<Detection> perfect = {det(0, box_at(0)), det(0, box_at(1))};
        const auto p = detection_prf(perfect, gt, {});
        CHECK(p.precision == 1.0);
        CHECK(p.recall == 1.0);
        CHECK(p.f == 1.0);

        const auto none = detection_prf({}, gt, {});
        CHECK(none.precision == 0.0);
        CHECK(none.recall == 0.0);
        CHECK(none.f == 0.0);

        const std::vector<Detection> mixed = {det(0, box_at(0)), det(0, box_at(5))};
        const auto m = detection_prf(mixed, gt, {});
        CHECK(m.precision == 0.5);
        CHECK(m.recall == 0.5);
        CHECK(m.f == 0.5);
    }

    TEST_CASE("detections in the wrong frame do not match") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 0)};
        const std::vector<Detection> d = {det(1, box_at(0))};
        const auto c = detection_counts(d, gt, {});
        CHECK(c.tp == 0);
        CHECK(c.fp == 1);
        CHECK(c.fn == 1);
    }

    TEST_CASE("ratio conventions") {
        CHECK(ratio(0, 0) == 0.0);
        CHECK(harmonic(0, 0) == 0.0);
        CHECK(harmonic(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
        MatchingConfig bad;
        bad.iou_threshold = 1.0;
        CHECK_THROWS_AS(bad.validate(), ContractError);
    }
}

TEST_SUITE("tracking") {
    TEST_CASE("predictions identical to GT") {
        std::vector<GroundTruthRecord> gt;
        for (int f = 0; f < 5; ++f) {
            gt.push_back(rec(f, 1));
            gt.push_back(rec(f, 2));
        }
        const std::vector<TextStream> pred = {pred_stream(1, 1, {0, 1, 2, 3, 4}), pred_stream(2, 2, {0, 1, 2, 3, 4})};
        const auto s = tracking_metrics(pred, gt, {});
        CHECK(s.motp == 1.0);
        CHECK(s.mota == 1.0);
        CHECK(s.ata == 1.0);
    }

    TEST_CASE("empty predictions") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 1), rec(1, 1)};
        const auto s = tracking_metrics({}, gt, {});
        CHECK(s.motp == 0.0);
        CHECK(s.mota == 0.0);
        CHECK(s.ata == 0.0);
    }

    TEST_CASE("a four-frame stream tracked in two frames") {
        std::vector<GroundTruthRecord> gt;
        for (int f = 0; f < 4; ++f) gt.push_back(rec(f, 1));
        const std::vector<TextStream> pred = {pred_stream(1, 1, {0, 1})};
        const auto c = tracking_counts(pred, gt, {});
        CHECK(c.fn == 2);
        CHECK(c.fp == 0);
        CHECK(c.id_switches == 0);
        const auto s = tracking_scores(c);
        CHECK(s.mota == doctest::Approx(0.5));
        CHECK(s.ata == doctest::Approx(0.5));
        CHECK(s.motp == 1.0);
    }

    TEST_CASE("an identity switch is counted and MOTA may go negative") {
        std::vector<GroundTruthRecord> gt;
        for (int f = 0; f < 4; ++f) gt.push_back(rec(f, 1));
        const std::vector<TextStream> pred = {pred_stream(1, 1, {0, 1}), pred_stream(2, 1, {2, 3})};
        CHECK(tracking_counts(pred, gt, {}).id_switches == 1);
        const std::vector<TextStream> noisy = {pred_stream(1, 7, {0, 1, 2, 3}), pred_stream(2, 8, {0, 1, 2, 3})};
        CHECK(tracking_metrics(noisy, gt, {}).mota < 0.0);
    }
}

TEST_SUITE("selection") {
    TEST_CASE("QSHR 3 of 4") {
        std::vector<GroundTruthRecord> gt;
        for (int id = 1; id <= 4; ++id) {
            gt.push_back(rec(0, id, Quality::High));
            gt.push_back(rec(1, id, Quality::Low));
        }
        const std::vector<StreamDecision> d = {decide(1, 0, 1, "T1"), decide(2, 0, 2, "T2"), decide(3, 0, 3, "T3"),
                                               decide(4, 1, 4, "T4")};
        CHECK(qshr(d, gt) == doctest::Approx(0.75));
        CHECK(rcr(d, gt) == 1.0);
    }

    TEST_CASE("streams without a high record are excluded from QSHR") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 1, Quality::High), rec(0, 2, Quality::Low)};
        const std::vector<StreamDecision> d = {decide(1, 0, 1, "T1"), decide(2, 0, 2, "T2")};
        const auto c = selection_counts(d, gt, {});
        CHECK(c.qshr_streams == 1);
        CHECK(c.qshr_excluded == 1);
        CHECK(qshr(d, gt) == 1.0);
    }

    TEST_CASE("RCR 2 of 5, none, and case handling") {
        std::vector<GroundTruthRecord> gt;
        std::vector<StreamDecision> d, wrong;
        for (int id = 1; id <= 5; ++id) {
            gt.push_back(rec(0, id));
            d.push_back(decide(id, 0, id, id <= 2 ? "T" + std::to_string(id) : "bad"));
            wrong.push_back(decide(id, 0, id, "t" + std::to_string(id)));
        }
        CHECK(rcr(d, gt) == doctest::Approx(0.4));
        CHECK(rcr(wrong, gt) == 0.0);
        MatchingConfig ci;
        ci.transcript_match = TranscriptMatch::CaseInsensitive;
        CHECK(rcr(wrong, gt, ci) == 1.0);
    }

    TEST_CASE("uniformly random choices hit one high frame in five about a fifth of the time") {
        std::mt19937_64 rng(2000);
        std::uniform_int_distribution<int> pick(0, 4);
        std::vector<GroundTruthRecord> gt;
        std::vector<StreamDecision> d;
        for (int id = 0; id < 2000; ++id) {
            const int high = pick(rng);
            for (int f = 0; f < 5; ++f) gt.push_back(rec(f, id, f == high ? Quality::High : Quality::Moderate));
            d.push_back(decide(id, pick(rng), id, "T" + std::to_string(id)));
        }
        CHECK(std::abs(qshr(d, gt) - 0.2) <= 0.05);
    }
}

TEST_SUITE("end to end") {
    TEST_CASE("perfect decisions") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 1), rec(1, 1), rec(0, 2)};
        const std::vector<StreamDecision> d = {decide(1, 1, 1, "T1"), decide(2, 0, 2, "T2")};
        const auto r = end_to_end(d, gt);
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.f == 1.0);
    }

    TEST_CASE("two decisions on one GT stream credit it once") {
        const std::vector<GroundTruthRecord> gt = {rec(0, 1), rec(0, 2)};
        const std::vector<StreamDecision> d = {decide(1, 0, 1, "T1"), decide(2, 0, 1, "T1")};
        const auto c = end_to_end_counts(d, gt, {});
        CHECK(c.n_r == 1);
        CHECK(c.n_d == 2);
        CHECK(c.n_g == 2);
        const auto r = c.rates();
        CHECK(r.precision == 0.5);
        CHECK(r.recall == 0.5);
        CHECK(r.f == 0.5);
    }

    TEST_CASE("a frame outside the annotated span is not recalled") {
        const std::vector<GroundTruthRecord> gt = {rec(2, 1), rec(3, 1)};
        CHECK_FALSE(recalls(decide(1, 5, 1, "T1"), 1, gt, {}));
        CHECK(recalls(decide(1, 3, 1, "T1"), 1, gt, {}));
        CHECK(end_to_end_counts(std::vector<StreamDecision>{decide(1, 5, 1, "T1")}, gt, {}).n_r == 0);
    }

    TEST_CASE("speedup ratio") {
        CHECK(speedup_ratio(71, 1) == 71.0);
        CHECK(speedup_ratio(9, 9) == 1.0);
        CHECK(speedup_ratio(500, 20) == 25.0);
        CHECK_THROWS_AS((void)speedup_ratio(5, 0), ContractError);
    }
}

TEST_SUITE("properties") {
    struct Instance {
        std::vector<GroundTruthRecord> gt;
        std::vector<StreamDecision> decisions;
    };

    Instance random_instance(std::mt19937_64& rng) {
        std::uniform_int_distribution<int> n_streams(1, 4), n_frames(1, 6), n_dec(0, 5);
        std::uniform_int_distribution<int> slot(0, 2), coin(0, 3);
        Instance in;
        const int s = n_streams(rng), frames = n_frames(rng);
        for (int id = 0; id < s; ++id) {
            const int start = std::uniform_int_distribution<int>(0, frames - 1)(rng);
            const int end = std::uniform_int_distribution<int>(start, frames - 1)(rng);
            const int where = slot(rng);
            for (int f = start; f <= end; ++f) {
                auto g = rec(f, id, Quality::High, coin(rng) == 0 ? "A" : "B");
                g.quad = box_at(where);
                in.gt.push_back(g);
            }
        }
        const int nd = n_dec(rng);
        for (int k = 0; k < nd; ++k)
            in.decisions.push_back(decide(k, std::uniform_int_distribution<int>(0, frames - 1)(rng), slot(rng),
                                          coin(rng) < 2 ? "A" : "B"));
        return in;
    }

    TEST_CASE("end to end matches the exhaustive matcher") {
        std::mt19937_64 rng(500);
        for (int t = 0; t < 500; ++t) {
            const auto in = random_instance(rng);
            CHECK(end_to_end_counts(in.decisions, in.gt, {}).n_r == oracle::exhaustive_recalled(in.decisions, in.gt, 0.5));
        }
    }

    TEST_CASE("corrupting a correct decision never raises recall, precision, RCR or F") {
        std::mt19937_64 rng(501);
        for (int t = 0; t < 300; ++t) {
            auto in = random_instance(rng);
            if (in.decisions.empty()) continue;
            const auto before = end_to_end(in.decisions, in.gt);
            const double rcr_before = rcr(in.decisions, in.gt);
            in.decisions[std::size_t(t) % in.decisions.size()].final_text = "corrupt";
            const auto after = end_to_end(in.decisions, in.gt);
            CHECK(after.recall <= before.recall);
            CHECK(after.precision <= before.precision);
            CHECK(after.f <= before.f);
            CHECK(rcr(in.decisions, in.gt) <= rcr_before);
        }
    }

    TEST_CASE("shuffling input order changes nothing") {
        std::mt19937_64 rng(502);
        for (int t = 0; t < 200; ++t) {
            auto in = random_instance(rng);
            const auto a = end_to_end_counts(in.decisions, in.gt, {});
            const auto q = selection_counts(in.decisions, in.gt, {});
            std::shuffle(in.decisions.begin(), in.decisions.end(), rng);
            std::shuffle(in.gt.begin(), in.gt.end(), rng);
            const auto b = end_to_end_counts(in.decisions, in.gt, {});
            const auto r = selection_counts(in.decisions, in.gt, {});
            CHECK(a.n_r == b.n_r);
            CHECK(a.n_g == b.n_g);
            CHECK(q.rcr_hits == r.rcr_hits);
            CHECK(q.qshr_hits == r.qshr_hits);
        }
    }

    TEST_CASE("merging counts equals evaluating the union") {
        std::mt19937_64 rng(503);
        for (int t = 0; t < 100; ++t) {
            auto a = random_instance(rng);
            auto b = random_instance(rng);
            for (auto& g : b.gt) g.id += 100;
            for (auto& d : b.decisions) d.stream_id += 100;
            for (auto& g : b.gt) g.frame += 10;
            for (auto& d : b.decisions) d.chosen_frame += 10;
            auto merged = end_to_end_counts(a.decisions, a.gt, {});
            merged += end_to_end_counts(b.decisions, b.gt, {});
            Instance u = a;
            u.gt.insert(u.gt.end(), b.gt.begin(), b.gt.end());
            u.decisions.insert(u.decisions.end(), b.decisions.begin(), b.decisions.end());
            const auto whole = end_to_end_counts(u.decisions, u.gt, {});
            CHECK(merged.n_r == whole.n_r);
            CHECK(merged.n_g == whole.n_g);
            CHECK(merged.n_d == whole.n_d);
            const auto r = whole.rates();
            CHECK(r.precision >= 0.0);
            CHECK(r.precision <= 1.0);
            CHECK(r.f <= std::max(r.precision, r.recall) + 1e-12);
        }
    }

    TEST_CASE("the report has one key=value line per field in a fixed order") {
        EvalCounts c;
        c.regions_total = 10;
        c.recognitions_consumed = 2;
        const auto kv = EvalReport::from_counts(c).to_key_values();
        CHECK(kv.rfind("det_precision=", 0) == 0);
        CHECK(kv.find("speedup=5") != std::string::npos);
        CHECK(kv.find("mota=") < kv.find("ata="));
    }
}
