#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "vts/errors.hpp"
#include "vts/io.hpp"
#include "vts/recognizer.hpp"

using namespace vts;

namespace {

TensorGrid sequential(int h, int w, int c) {
    std::vector<float> v(std::size_t(h * w * c));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = float(i) * 0.25f - 1.0f;
    return TensorGrid(h, w, c, std::move(v));
}

std::vector<GroundTruthRecord> parse_gt(const std::string& text) {
    std::istringstream in(text);
    return io::parse_annotations(in);
}

}  // namespace

TEST_SUITE("tensor grid files") {
    TEST_CASE("save then load reproduces a 2x3x4 grid bit for bit") {
        const auto dir = oracle::scratch_dir("io_grid");
        const auto g = sequential(2, 3, 4);
        io::save_tensor_grid(dir / "g.vtg", g);
        const auto back = io::load_tensor_grid(dir / "g.vtg");
        CHECK(back == g);
        CHECK(io::encode_tensor_grid(back) == io::encode_tensor_grid(g));
    }

    TEST_CASE("a 1x1x1 grid holds its single value") {
        const auto bytes = io::encode_tensor_grid(TensorGrid(1, 1, 1, 0.5f));
        CHECK(bytes.size() == 16 + 12 + 4);
        const auto g = io::decode_tensor_grid(bytes);
        CHECK(g.height() == 1);
        CHECK(g.at(0, 0) == 0.5f);
    }

    TEST_CASE("a payload shorter than the header declares is a truncation error") {
        auto bytes = io::encode_tensor_grid(sequential(2, 3, 4));
        bytes.resize(bytes.size() - 4);
        CHECK_THROWS_AS((void)io::decode_tensor_grid(bytes), FormatError);
    }

    TEST_CASE("trailing bytes and a bad magic are rejected") {
        auto bytes = io::encode_tensor_grid(sequential(1, 2, 1));
        auto longer = bytes;
        longer.push_back(0);
        CHECK_THROWS_AS((void)io::decode_tensor_grid(longer), FormatError);
        bytes[0] = 'X';
        try {
            (void)io::decode_tensor_grid(bytes);
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 0);
        }
    }

    TEST_CASE("non-finite values are reported at their byte offset") {
        auto bytes = io::encode_tensor_grid(sequential(1, 3, 1));
        const float nan = std::numeric_limits<float>::quiet_NaN();
        std::memcpy(bytes.data() + 28 + 4 * 2, &nan, 4);
        try {
            (void)io::decode_tensor_grid(bytes);
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 36);
        }
    }

    TEST_CASE("grids cannot be built with non-finite data or the wrong length") {
        CHECK_THROWS_AS(TensorGrid(1, 1, 2, std::vector<float>{1.0f}), ContractError);
        CHECK_THROWS_AS(TensorGrid(1, 1, 1, std::vector<float>{std::numeric_limits<float>::infinity()}), ContractError);
    }

    TEST_CASE("flow fields round-trip") {
        FlowField f = FlowField::uniform(2, 3, 0.5f, -1.25f);
        f.dx[4] = 3.0f;
        const auto back = io::decode_flow_field(io::encode_flow_field(f));
        CHECK(back == f);
    }

    TEST_CASE("missing files raise a missing-input error naming the path") {
        try {
            (void)io::load_tensor_grid("/nonexistent/x.vtg");
            FAIL("expected an error");
        } catch (const MissingInputError& e) {
            CHECK(e.path() == "/nonexistent/x.vtg");
        }
    }

    TEST_CASE("random grids round-trip bit-exactly") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<float> d(-1e6f, 1e6f);
        for (int t = 0; t < 20; ++t) {
            const int h = 1 + t % 5, w = 1 + t % 3, c = 1 + t % 4;
            std::vector<float> v(std::size_t(h * w * c));
            for (auto& x : v) x = d(rng);
            const TensorGrid g(h, w, c, v);
            CHECK(io::decode_tensor_grid(io::encode_tensor_grid(g)) == g);
        }
    }
}

TEST_SUITE("annotations") {
    TEST_CASE("a high-quality record parses") {
        const auto r = parse_gt("0\t3\t0\t0\t10\t0\t10\t5\t0\t5\tLatin\thigh\tEXIT\n");
        REQUIRE(r.size() == 1);
        CHECK(r[0].id == 3);
        CHECK(r[0].quality == Quality::High);
        CHECK(r[0].transcript == "EXIT");
        CHECK(area(r[0].quad) == doctest::Approx(50.0));
    }

    TEST_CASE("an empty file gives no records") {
        CHECK(parse_gt("").empty());
        CHECK(parse_gt("# comment only\n\n").empty());
    }

    TEST_CASE("duplicate identities in one frame are rejected with the line number") {
        const std::string line = "1\t2\t0\t0\t1\t0\t1\t1\t0\t1\tLatin\tlow\tA\n";
        try {
            (void)parse_gt(line + line);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("unknown quality labels and short polygons are parse errors") {
        CHECK_THROWS_AS((void)parse_gt("0\t1\t0\t0\t1\t0\t1\t1\t0\t1\tLatin\tsuperb\tA\n"), ParseError);
        CHECK_THROWS_AS((void)parse_gt("0\t1\t0\t0\t1\t0\t1\t1\t0\tLatin\thigh\tA\n"), ParseError);
        try {
            (void)parse_gt("0\t1\t0\t0\t1\t0\t1\t1\t0\t1\tLatin\thigh\tA\n0\t2\t0\t0\t1\tx\t1\t1\t0\t1\tLatin\thigh\tB\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("records come back sorted and round-trip through the formatter") {
        const auto r = parse_gt(
            "2\t1\t0\t0\t1\t0\t1\t1\t0\t1\tNonLatin\tmoderate\ttwo words\n"
            "0\t5\t0.5\t0\t1.25\t0\t1\t1\t0\t1\tLatin\tlow\tB\n"
            "0\t4\t0\t0\t1\t0\t1\t1\t0\t1\tLatin\thigh\tC\n");
        REQUIRE(r.size() == 3);
        CHECK(r[0].id == 4);
        CHECK(r[1].id == 5);
        CHECK(r[2].transcript == "two words");
        CHECK(r[2].language == Language::NonLatin);
        const auto again = parse_gt(io::format_annotations(r));
        REQUIRE(again.size() == 3);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(again[i].quad == r[i].quad);
            CHECK(again[i].transcript == r[i].transcript);
            CHECK(again[i].quality == r[i].quality);
        }
    }
}

TEST_SUITE("line formats") {
    TEST_CASE("detections, decisions and streams round-trip") {
        std::vector<Detection> dets = {{0, {Quad::from_box(0, 0, 4, 2), 0.875}}, {3, {Quad::from_box(1, 1, 2, 2), 1.0}}};
        std::istringstream din(io::format_detections(dets));
        const auto dback = io::parse_detections(din);
        REQUIRE(dback.size() == 2);
        CHECK(dback[1].frame == 3);
        CHECK(dback[0].region.score == 0.875);
        CHECK(dback[0].region.quad == dets[0].region.quad);

        std::vector<StreamDecision> dec = {{2, 5, Quad::from_box(0, 0, 1, 1), "HELLO WORLD", 0.1 + 0.2}};
        std::istringstream cin(io::format_decisions(dec));
        const auto cback = io::parse_decisions(cin);
        REQUIRE(cback.size() == 1);
        CHECK(cback[0].final_text == "HELLO WORLD");
        CHECK(cback[0].quality_score == 0.1 + 0.2);

        TextStream s;
        s.id = 7;
        for (int f : {1, 2, 4}) s.observations.push_back({f, Quad::from_box(f, 0, f + 1, 1), {1.0}, {}, {}, {}});
        const std::vector<TextStream> streams = {s};
        std::istringstream sin(io::format_streams(streams));
        const auto lines = io::parse_stream_lines(sin);
        const auto sback = io::streams_from_lines(lines);
        REQUIRE(sback.size() == 1);
        CHECK(sback[0].id == 7);
        REQUIRE(sback[0].observations.size() == 3);
        CHECK(sback[0].observations[2].frame == 4);
    }

    TEST_CASE("observations round-trip through JSON lines") {
        RegionObservation o;
        o.frame = 3;
        o.quad = Quad::from_box(0.1, 0.2, 5.5, 3.25);
        o.embedding = {0.1, -0.7, 1e-300};
        o.hypothesis = RecognitionHypothesis{"AB", {0.9, 0.3}, {{1.0, 0.0}, {0.25, -2.0}}};
        o.teacher_score = 0.8125;
        const std::vector<RegionObservation> obs = {o, RegionObservation{1, Quad::from_box(0, 0, 1, 1), {1.0}, {}, {}, 0.5}};
        std::istringstream in(io::format_observations(obs));
        const auto back = io::parse_observations(in);
        REQUIRE(back.size() == 2);
        CHECK(back[0].embedding == o.embedding);
        CHECK(back[0].quad == o.quad);
        REQUIRE(back[0].hypothesis.has_value());
        CHECK(back[0].hypothesis->char_features == o.hypothesis->char_features);
        CHECK(back[0].teacher_score == 0.8125);
        CHECK_FALSE(back[0].student_score.has_value());
        CHECK_FALSE(back[1].hypothesis.has_value());
        CHECK(back[1].student_score == 0.5);
    }

    TEST_CASE("malformed observation lines are parse errors") {
        std::istringstream bad("{\"frame\": 0, \"quad\": [1,2,3], \"embedding\": [1]}\n");
        CHECK_THROWS_AS((void)io::parse_observations(bad), ParseError);
        std::istringstream junk("not json\n");
        CHECK_THROWS_AS((void)io::parse_observations(junk), ParseError);
    }

    TEST_CASE("key-value files round-trip") {
        const std::map<std::string, std::string> kv = {{"b", "2"}, {"a", "x=y"}};
        std::istringstream in(io::format_key_values(kv));
        CHECK(io::parse_key_values(in) == kv);
    }

    TEST_CASE("format_double is shortest and exact") {
        CHECK(io::format_double(0.5) == "0.5");
        CHECK(io::format_double(71.0) == "71");
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(-1e9, 1e9);
        for (int i = 0; i < 1000; ++i) {
            const double v = d(rng);
            CHECK(std::stod(io::format_double(v)) == v);
        }
    }

    TEST_CASE("write_file_atomic leaves no temporary behind") {
        const auto dir = oracle::scratch_dir("io_atomic");
        io::write_file_atomic(dir / "f.txt", "hello");
        io::write_file_atomic(dir / "f.txt", "again");
        CHECK(oracle::slurp(dir / "f.txt") == "again");
        int files = 0;
        for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
        CHECK(files == 1);
    }
}

TEST_SUITE("synthetic recognizer") {
    TEST_CASE("zero error reproduces the text with certain probabilities") {
        const auto h = synthetic_recognizer("AB", ErrorModel{}, 7);
        CHECK(h.text == "AB");
        CHECK(h.char_probs == std::vector<double>{1.0, 1.0});
        CHECK(h.char_features.size() == 2);
        CHECK(h.char_features[0] == char_anchor('A', 16));
    }

    TEST_CASE("identical inputs give identical outputs") {
        ErrorModel m;
        m.substitution_prob = 0.4;
        m.feature_noise = 0.3;
        m.prob_noise = 0.2;
        const auto a = synthetic_recognizer("HELLO", m, 99);
        const auto b = synthetic_recognizer("HELLO", m, 99);
        CHECK(a.text == b.text);
        CHECK(a.char_probs == b.char_probs);
        CHECK(a.char_features == b.char_features);
    }

    TEST_CASE("a forced substitution changes position zero, as logged in the trace") {
        ErrorModel m;
        m.forced_substitutions = {0};
        std::vector<RecognizerEvent> trace;
        const auto h = synthetic_recognizer("AB", m, 7, &trace);
        REQUIRE(trace.size() == 1);
        CHECK(trace[0].position == 0);
        CHECK(trace[0].original == 'A');
        CHECK(h.text[0] == trace[0].emitted);
        CHECK(h.text[0] != 'A');
        CHECK(h.text[1] == 'B');
    }

    TEST_CASE("zero noise reproduces every random string") {
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<int> ch(33, 126);
        for (int t = 0; t < 200; ++t) {
            std::string s(std::size_t(1 + t % 12), ' ');
            for (auto& c : s) c = char(ch(rng));
            const auto h = synthetic_recognizer(s, ErrorModel{}, std::uint64_t(t));
            CHECK(h.text == s);
            CHECK(std::all_of(h.char_probs.begin(), h.char_probs.end(), [](double p) { return p == 1.0; }));
            h.validate();
        }
    }

    TEST_CASE("confusable sets never contain the character itself") {
        for (int c = 33; c <= 126; ++c) {
            const auto alts = confusable(char(c));
            CHECK_FALSE(alts.empty());
            CHECK(std::find(alts.begin(), alts.end(), char(c)) == alts.end());
        }
    }

    TEST_CASE("char anchors are unit vectors") {
        for (char c : std::string("AZ09#")) {
            const auto a = char_anchor(c, 32);
            double n = 0.0;
            for (double x : a) n += x * x;
            CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("systematic errors keep the per-character rate") {
        ErrorModel m;
        m.substitution_prob = 0.3;
        m.systematic_share = 0.7;
        long subs = 0, total = 0;
        for (std::uint64_t stream = 0; stream < 400; ++stream) {
            m.systematic_seed = mix_seed(stream, 17);
            for (std::uint64_t k = 0; k < 10; ++k) {
                const auto h = synthetic_recognizer("ABCDEFGH", m, mix_seed(stream, 1000 + k));
                for (std::size_t i = 0; i < 8; ++i) subs += h.text[i] != "ABCDEFGH"[i];
                total += 8;
            }
        }
        CHECK(double(subs) / double(total) == doctest::Approx(0.3).epsilon(0.05));
    }

    TEST_CASE("a fully systematic model misreads a stream the same way every time") {
        ErrorModel m;
        m.substitution_prob = 0.5;
        m.systematic_share = 1.0;
        m.systematic_seed = 1234;
        const auto first = synthetic_recognizer("ABCDEFGHIJ", m, 1).text;
        for (std::uint64_t s = 2; s < 20; ++s) CHECK(synthetic_recognizer("ABCDEFGHIJ", m, s).text == first);
    }
}
