#include <doctest.h>

#include <cmath>
#include <random>

#include "vts/errors.hpp"
#include "vts/quality.hpp"

using namespace vts;
using namespace vts::quality;

namespace {

RegionObservation observed(int frame, std::string text, std::vector<double> probs, CharFeatures feats = {}) {
    RegionObservation o;
    o.frame = frame;
    o.quad = Quad::from_box(frame, 0, frame + 1, 1);
    if (feats.empty()) feats.assign(text.size(), Vec{1.0});
    o.hypothesis = RecognitionHypothesis{std::move(text), std::move(probs), std::move(feats)};
    return o;
}

TextStream stream_of(std::vector<RegionObservation> obs, int id = 7) {
    TextStream s;
    s.id = id;
    s.last_active_frame = obs.empty() ? 0 : obs.back().frame;
    s.observations = std::move(obs);
    return s;
}

}  // namespace

TEST_SUITE("template") {
    TEST_CASE("a single feature is its own template") {
        const std::vector<CharFeatures> f = {{{1.0, 2.0}, {3.0, 4.0}}};
        RecommenderConfig cfg;
        cfg.t_max = 2;
        const auto t = estimate_template(f, cfg);
        CHECK(t.features == f[0]);
        CHECK(t.source_count == 1);
        const std::vector<CharFeatures> twice = {f[0], f[0]};
        CHECK(estimate_template(twice, cfg).features == f[0]);
    }

    TEST_CASE("one cluster averages the points") {
        const std::vector<CharFeatures> f = {{{0.0, 0.0}}, {{2.0, 0.0}}, {{4.0, 0.0}}};
        RecommenderConfig cfg;
        cfg.t_max = 1;
        const auto t = estimate_template(f, cfg);
        CHECK(t.features[0][0] == doctest::Approx(2.0));
        CHECK(t.features[0][1] == 0.0);
    }

    TEST_CASE("the largest cluster wins") {
        const std::vector<CharFeatures> f = {{{10.0}}, {{0.0}}, {{0.2}}, {{0.4}}};
        RecommenderConfig cfg;
        cfg.t_max = 1;
        cfg.k_clusters = 2;
        CHECK(estimate_template(f, cfg).features[0][0] == doctest::Approx(0.2));
    }

    TEST_CASE("short inputs are zero padded") {
        CHECK(pad_flatten({{1.0, 2.0}}, 3, 2) == Vec{1, 2, 0, 0, 0, 0});
        CHECK(pad_flatten({{1.0}, {2.0}, {3.0}}, 2, 1) == Vec{1, 2});
        CHECK_THROWS_AS((void)pad_flatten({{1.0, 2.0}, {3.0}}, 2, 2), ContractError);
    }

    TEST_CASE("no correct features is an error") {
        CHECK_THROWS_AS((void)estimate_template({}, {}), NoTemplateError);
    }
}

TEST_SUITE("teacher") {
    TEST_CASE("cosine examples") {
        Template t;
        t.features = {{1.0, 0.0}};
        CHECK(teacher_score({{1.0, 0.0}}, t, 1) == doctest::Approx(1.0));
        CHECK(teacher_score({{0.0, 3.0}}, t, 1) == doctest::Approx(0.0));
        CHECK(teacher_score({{1.0, 1.0}}, t, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK_THROWS_AS((void)teacher_score({{0.0, 0.0}}, t, 1), ContractError);
    }

    TEST_CASE("a stream's correct observations define the template") {
        const auto s = stream_of({observed(0, "AB", {0.9, 0.9}, {{1, 0}, {0, 1}}),
                                  observed(1, "AX", {0.9, 0.9}, {{0, 1}, {1, 0}}),
                                  observed(2, "AB", {0.9, 0.9}, {{1, 0}, {0, 1}})});
        RecommenderConfig cfg;
        cfg.t_max = 2;
        const auto r = teacher_scores(s, "AB", cfg);
        CHECK_FALSE(r.used_fallback);
        CHECK(r.correct_count == 2);
        CHECK(r.scores[0] == doctest::Approx(1.0));
        CHECK(r.scores[1] == doctest::Approx(0.0));
        CHECK(r.scores[2] == doctest::Approx(1.0));
    }

    TEST_CASE("without any correct read the mean character probability is used") {
        const auto s = stream_of({observed(0, "X", {0.4}), observed(1, "Y", {0.8})});
        const auto r = teacher_scores(s, "Z");
        CHECK(r.used_fallback);
        CHECK(r.scores == std::vector<double>{0.4, 0.8});
    }
}

TEST_SUITE("student") {
    TEST_CASE("passthrough returns the teacher score") {
        RegionObservation o;
        o.teacher_score = 0.83;
        CHECK(PassthroughStudent{}.predict(o) == 0.83);
        CHECK_THROWS_AS((void)PassthroughStudent{}.predict(RegionObservation{}), ContractError);
    }

    TEST_CASE("exactly linear data is recovered with zero regularization") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> n01;
        const Vec w{0.5, -1.25, 2.0};
        std::vector<TrainingSample> train;
        for (int i = 0; i < 40; ++i) {
            Vec x{n01(rng), n01(rng), n01(rng)};
            train.push_back({x, w[0] * x[0] + w[1] * x[1] + w[2] * x[2]});
        }
        const auto m = fit_student(train, 0.0);
        for (const auto& s : train) CHECK(std::abs(m.predict(s.embedding) - s.teacher_score) <= 1e-6);
    }

    TEST_CASE("y = 2x + 1") {
        std::vector<TrainingSample> train;
        for (int i = -3; i <= 5; ++i) train.push_back({Vec{double(i)}, 2.0 * i + 1.0});
        const auto m = fit_student(train, 0.0);
        CHECK(m.weights()[0] == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(m.intercept() == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("constant and zero targets") {
        std::vector<TrainingSample> half, zero;
        for (int i = 0; i < 6; ++i) {
            half.push_back({Vec{double(i), double(i * i)}, 0.5});
            zero.push_back({Vec{double(i), 1.0 - i}, 0.0});
        }
        const auto m = fit_student(half, 1e-3);
        CHECK(m.predict(Vec{100.0, -3.0}) == doctest::Approx(0.5).epsilon(1e-12));
        const auto z = fit_student(zero, 0.1);
        for (double w : z.weights()) CHECK(w == doctest::Approx(0.0));
        CHECK(z.intercept() == doctest::Approx(0.0));
    }

    TEST_CASE("contradictory duplicates predict their mean") {
        const std::vector<TrainingSample> train = {{Vec{1.0, 2.0}, 0.0}, {Vec{1.0, 2.0}, 1.0}};
        CHECK(fit_student(train, 0.0).predict(Vec{1.0, 2.0}) == doctest::Approx(0.5));
    }

    TEST_CASE("errors") {
        const std::vector<TrainingSample> train = {{Vec{1.0}, 0.0}};
        CHECK_THROWS_AS((void)fit_student(train, -1.0), ContractError);
        CHECK_THROWS_AS((void)fit_student({}, 0.0), ContractError);
        CHECK_THROWS_AS((void)RidgeStudent{}.predict(Vec{1.0}), ContractError);
        CHECK_THROWS_AS((void)RidgeStudent(Vec{1.0}, 0.0).predict(Vec{1.0, 2.0}), ContractError);
    }

    TEST_CASE("json round trip") {
        const RidgeStudent m(Vec{0.1, -0.2}, 0.3);
        const auto back = RidgeStudent::from_json(m.to_json());
        CHECK(back.weights() == m.weights());
        CHECK(back.intercept() == m.intercept());
        CHECK_THROWS_AS((void)RidgeStudent::from_json("{\"kind\":\"mlp\"}"), ContractError);
        CHECK_THROWS_AS((void)RidgeStudent::from_json("not json"), ContractError);
    }
}

TEST_SUITE("select") {
    TEST_CASE("TR takes the highest student score") {
        auto s = stream_of({observed(0, "A", {0.9}), observed(1, "B", {0.1}), observed(2, "C", {0.9})});
        const double scores[] = {0.2, 0.9, 0.4};
        for (std::size_t i = 0; i < 3; ++i) s.observations[i].student_score = scores[i];
        const auto d = select(s, SelectionPolicy::TR);
        CHECK(d.stream_id == 7);
        CHECK(d.chosen_frame == 1);
        CHECK(d.final_text == "B");
        CHECK(d.quality_score == 0.9);
        CHECK(d.chosen_quad == s.observations[1].quad);
    }

    TEST_CASE("HFP takes the first occurrence of the modal text") {
        const auto s = stream_of({observed(0, "DOG", {0.1, 0.1, 0.1}), observed(1, "CAT", {0.5, 0.5, 0.5}),
                                  observed(2, "DOG", {0.1, 0.1, 0.1}), observed(3, "CAT", {0.5, 0.5, 0.5}),
                                  observed(4, "CAT", {0.5, 0.5, 0.5})});
        const auto d = select(s, SelectionPolicy::HFP);
        CHECK(d.final_text == "CAT");
        CHECK(d.chosen_frame == 1);
    }

    TEST_CASE("HFP ties go to the higher mean probability, then the earlier text") {
        const auto by_prob = stream_of({observed(0, "AA", {0.2, 0.2}), observed(1, "BB", {0.7, 0.7})});
        CHECK(select(by_prob, SelectionPolicy::HFP).final_text == "BB");
        const auto by_frame = stream_of({observed(0, "ZZ", {0.5, 0.5}), observed(1, "AA", {0.5, 0.5})});
        CHECK(select(by_frame, SelectionPolicy::HFP).final_text == "ZZ");
    }

    TEST_CASE("PCW takes the highest mean character probability") {
        const auto s = stream_of({observed(0, "AB", {0.5, 0.5}), observed(1, "AC", {0.9, 0.7})});
        const auto d = select(s, SelectionPolicy::PCW);
        CHECK(d.chosen_frame == 1);
        CHECK(d.quality_score == doctest::Approx(0.8));
    }

    TEST_CASE("missing fields make a policy unavailable") {
        auto s = stream_of({observed(0, "A", {0.9}), observed(1, "B", {0.9})}, 42);
        try {
            (void)select(s, SelectionPolicy::TR);
            FAIL("expected PolicyUnavailableError");
        } catch (const PolicyUnavailableError& e) {
            CHECK(std::string(e.what()).find("42") != std::string::npos);
        }
        s.observations[1].hypothesis.reset();
        CHECK_THROWS_AS((void)select(s, SelectionPolicy::PCW), PolicyUnavailableError);
        CHECK_THROWS_AS((void)select(stream_of({}), SelectionPolicy::PCW), ContractError);
    }

    TEST_CASE("TR is invariant under positive affine score transforms") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            std::vector<RegionObservation> obs;
            for (int f = 0; f < 6; ++f) {
                obs.push_back(observed(f, "T", {0.5}));
                obs.back().student_score = u(rng);
            }
            auto s = stream_of(obs);
            const int before = select(s, SelectionPolicy::TR).chosen_frame;
            for (auto& o : s.observations) o.student_score = 3.0 * *o.student_score - 1.0;
            CHECK(select(s, SelectionPolicy::TR).chosen_frame == before);
        }
    }

    TEST_CASE("policy names") {
        for (auto p : {SelectionPolicy::TR, SelectionPolicy::PCW, SelectionPolicy::HFP})
            CHECK(parse_policy(to_string(p)) == p);
        CHECK_FALSE(parse_policy("best").has_value());
    }
}
