#include "vts/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "vts/errors.hpp"

namespace vts::io {

namespace {

using Bytes = std::vector<std::uint8_t>;
constexpr std::size_t kHeaderSize = 16 + 3 * 4;

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t((v >> (8 * i)) & 0xFFU));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[off + std::size_t(i)]) << (8 * i);
    return v;
}

Bytes encode_raw(std::string_view magic, int h, int w, int c, std::span<const float> values) {
    Bytes out;
    out.reserve(kHeaderSize + values.size() * 4);
    out.insert(out.end(), magic.begin(), magic.end());
    put_u32(out, std::uint32_t(h));
    put_u32(out, std::uint32_t(w));
    put_u32(out, std::uint32_t(c));
    for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

struct RawGrid {
    int h, w, c;
    std::vector<float> values;
};

RawGrid decode_raw(std::string_view magic, std::span<const std::uint8_t> b) {
    if (b.size() < 16) throw FormatError("grid header truncated: magic incomplete", b.size());
    if (!std::equal(magic.begin(), magic.end(), b.begin())) throw FormatError("bad magic", 0);
    if (b.size() < kHeaderSize) throw FormatError("grid header truncated: dimensions incomplete", b.size());
    const auto h = std::int32_t(get_u32(b, 16));
    const auto w = std::int32_t(get_u32(b, 20));
    const auto c = std::int32_t(get_u32(b, 24));
    if (h < 0) throw FormatError("negative height", 16);
    if (w < 0) throw FormatError("negative width", 20);
    if (c < 0) throw FormatError("negative channel count", 24);
    const std::uint64_t count = std::uint64_t(h) * std::uint64_t(w) * std::uint64_t(c);
    const std::uint64_t expected = kHeaderSize + 4 * count;
    if (b.size() < expected) {
        throw FormatError("payload truncated: header declares " + std::to_string(count) + " floats", b.size());
    }
    if (b.size() > expected) throw FormatError("trailing bytes after payload", std::size_t(expected));
    RawGrid g{h, w, c, std::vector<float>(count)};
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = kHeaderSize + 4 * i;
        const float v = std::bit_cast<float>(get_u32(b, off));
        if (!std::isfinite(v)) throw FormatError("non-finite value", off);
        g.values[i] = v;
    }
    return g;
}

Bytes read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputError(path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string> split_tabs(const std::string& line, std::size_t max_fields) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (out.size() + 1 < max_fields) {
        const auto pos = line.find('\t', start);
        if (pos == std::string::npos) break;
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    out.push_back(line.substr(start));
    return out;
}

double parse_double(const std::string& s, std::size_t line, const char* what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
    }
    return v;
}

int parse_int(const std::string& s, std::size_t line, const char* what) {
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
    return v;
}

Quad parse_quad(const std::vector<std::string>& f, std::size_t first, std::size_t line) {
    std::array<double, 8> xy{};
    for (std::size_t i = 0; i < 8; ++i) xy[i] = parse_double(f[first + i], line, "polygon coordinate");
    return Quad::from_coords(xy);
}

void append_quad(std::string& s, const Quad& q) {
    for (double v : q.coords()) {
        s += '\t';
        s += format_double(v);
    }
}

bool skip_line(const std::string& line) {
    return line.empty() || line[0] == '#';
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_line(line)) continue;
        fn(line, no);
    }
}

nlohmann::json vec_json(const Vec& v) {
    return nlohmann::json(v);
}

}  // namespace

std::vector<std::uint8_t> encode_tensor_grid(const TensorGrid& g) {
    return encode_raw(kGridMagic, g.height(), g.width(), g.channels(), g.data());
}

TensorGrid decode_tensor_grid(std::span<const std::uint8_t> bytes) {
    auto raw = decode_raw(kGridMagic, bytes);
    return TensorGrid(raw.h, raw.w, raw.c, std::move(raw.values));
}

void save_tensor_grid(const std::filesystem::path& path, const TensorGrid& g) {
    const auto b = encode_tensor_grid(g);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
}

TensorGrid load_tensor_grid(const std::filesystem::path& path) {
    return decode_tensor_grid(read_bytes(path));
}

std::vector<std::uint8_t> encode_flow_field(const FlowField& f) {
    std::vector<float> inter;
    inter.reserve(f.dx.size() * 2);
    for (std::size_t i = 0; i < f.dx.size(); ++i) {
        inter.push_back(f.dx[i]);
        inter.push_back(f.dy[i]);
    }
    return encode_raw(kFlowMagic, f.height, f.width, 2, inter);
}

FlowField decode_flow_field(std::span<const std::uint8_t> bytes) {
    const auto raw = decode_raw(kFlowMagic, bytes);
    if (raw.c != 2) throw FormatError("flow field must have 2 channels", 24);
    FlowField f{raw.h, raw.w, {}, {}};
    const std::size_t n = std::size_t(raw.h) * std::size_t(raw.w);
    f.dx.resize(n);
    f.dy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.dx[i] = raw.values[2 * i];
        f.dy[i] = raw.values[2 * i + 1];
    }
    return f;
}

void save_flow_field(const std::filesystem::path& path, const FlowField& f) {
    const auto b = encode_flow_field(f);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
}

FlowField load_flow_field(const std::filesystem::path& path) {
    return decode_flow_field(read_bytes(path));
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

std::vector<GroundTruthRecord> parse_annotations(std::istream& in) {
    std::vector<GroundTruthRecord> out;
    std::vector<std::size_t> line_of;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        const auto f = split_tabs(line, 13);
        if (f.size() != 13) {
            throw ParseError("expected 13 tab-separated fields (frame, id, 8 polygon coordinates, language, "
                             "quality, transcript), got " + std::to_string(f.size()),
                             no);
        }
        GroundTruthRecord r;
        r.frame = parse_int(f[0], no, "frame");
        r.id = parse_int(f[1], no, "id");
        if (r.frame < 0) throw ParseError("negative frame", no);
        r.quad = parse_quad(f, 2, no);
        const auto lang = parse_language(f[10]);
        if (!lang) throw ParseError("unknown language label '" + f[10] + "'", no);
        const auto qual = parse_quality(f[11]);
        if (!qual) throw ParseError("unknown quality label '" + f[11] + "'", no);
        r.language = *lang;
        r.quality = *qual;
        r.transcript = f[12];
        out.push_back(std::move(r));
        line_of.push_back(no);
    });

    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(out[a].frame, out[a].id) < std::pair(out[b].frame, out[b].id);
    });
    std::vector<GroundTruthRecord> sorted;
    sorted.reserve(out.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& r = out[order[k]];
        if (!sorted.empty() && sorted.back().frame == r.frame && sorted.back().id == r.id) {
            throw ParseError("duplicate identity " + std::to_string(r.id) + " in frame " + std::to_string(r.frame),
                             std::max(line_of[order[k]], line_of[order[k - 1]]));
        }
        sorted.push_back(r);
    }
    return sorted;
}

std::vector<GroundTruthRecord> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError(path.string());
    return parse_annotations(in);
}

std::string format_annotations(std::span<const GroundTruthRecord> records) {
    std::string s;
    for (const auto& r : records) {
        s += std::to_string(r.frame) + '\t' + std::to_string(r.id);
        append_quad(s, r.quad);
        s += '\t';
        s += to_string(r.language);
        s += '\t';
        s += to_string(r.quality);
        s += '\t';
        s += r.transcript;
        s += '\n';
    }
    return s;
}

std::vector<Detection> parse_detections(std::istream& in) {
    std::vector<Detection> out;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        const auto f = split_tabs(line, 10);
        if (f.size() != 10) throw ParseError("expected 10 fields (frame, 8 coordinates, score)", no);
        Detection d;
        d.frame = parse_int(f[0], no, "frame");
        d.region.quad = parse_quad(f, 1, no);
        d.region.score = parse_double(f[9], no, "score");
        out.push_back(d);
    });
    return out;
}

std::string format_detections(std::span<const Detection> dets) {
    std::string s;
    for (const auto& d : dets) {
        s += std::to_string(d.frame);
        append_quad(s, d.region.quad);
        s += '\t' + format_double(d.region.score) + '\n';
    }
    return s;
}

std::vector<StreamLine> parse_stream_lines(std::istream& in) {
    std::vector<StreamLine> out;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        const auto f = split_tabs(line, 10);
        if (f.size() != 10) throw ParseError("expected 10 fields (frame, id, 8 coordinates)", no);
        out.push_back({parse_int(f[0], no, "frame"), parse_int(f[1], no, "id"), parse_quad(f, 2, no)});
    });
    return out;
}

std::string format_streams(std::span<const TextStream> streams) {
    std::vector<StreamLine> lines;
    for (const auto& s : streams) {
        for (const auto& o : s.observations) lines.push_back({o.frame, s.id, o.quad});
    }
    std::stable_sort(lines.begin(), lines.end(), [](const StreamLine& a, const StreamLine& b) {
        return std::pair(a.frame, a.id) < std::pair(b.frame, b.id);
    });
    std::string s;
    for (const auto& l : lines) {
        s += std::to_string(l.frame) + '\t' + std::to_string(l.id);
        append_quad(s, l.quad);
        s += '\n';
    }
    return s;
}

std::vector<TextStream> streams_from_lines(std::span<const StreamLine> lines) {
    std::map<int, TextStream> by_id;
    for (const auto& l : lines) {
        auto& s = by_id[l.id];
        s.id = l.id;
        RegionObservation o;
        o.frame = l.frame;
        o.quad = l.quad;
        s.observations.push_back(std::move(o));
    }
    std::vector<TextStream> out;
    for (auto& [id, s] : by_id) {
        std::stable_sort(s.observations.begin(), s.observations.end(),
                         [](const auto& a, const auto& b) { return a.frame < b.frame; });
        s.last_active_frame = s.observations.back().frame;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<StreamDecision> parse_decisions(std::istream& in) {
    std::vector<StreamDecision> out;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        const auto f = split_tabs(line, 12);
        if (f.size() != 12) {
            throw ParseError("expected 12 fields (frame, stream id, 8 coordinates, quality score, text)", no);
        }
        StreamDecision d;
        d.chosen_frame = parse_int(f[0], no, "frame");
        d.stream_id = parse_int(f[1], no, "stream id");
        d.chosen_quad = parse_quad(f, 2, no);
        d.quality_score = parse_double(f[10], no, "quality score");
        d.final_text = f[11];
        out.push_back(std::move(d));
    });
    return out;
}

std::string format_decisions(std::span<const StreamDecision> decisions) {
    std::string s;
    for (const auto& d : decisions) {
        s += std::to_string(d.chosen_frame) + '\t' + std::to_string(d.stream_id);
        append_quad(s, d.chosen_quad);
        s += '\t' + format_double(d.quality_score) + '\t' + d.final_text + '\n';
    }
    return s;
}

std::vector<RegionObservation> parse_observations(std::istream& in) {
    std::vector<RegionObservation> out;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        try {
            const auto j = nlohmann::json::parse(line);
            RegionObservation o;
            o.frame = j.at("frame").get<int>();
            if (o.frame < 0) throw ParseError("negative frame", no);
            const auto xy = j.at("quad").get<std::vector<double>>();
            if (xy.size() != 8) throw ParseError("quad must have 8 coordinates", no);
            o.quad = Quad::from_coords(std::span<const double, 8>(xy.data(), 8));
            o.embedding = j.at("embedding").get<Vec>();
            if (j.contains("hypothesis")) {
                const auto& h = j.at("hypothesis");
                RecognitionHypothesis hyp;
                hyp.text = h.at("text").get<std::string>();
                hyp.char_probs = h.at("char_probs").get<std::vector<double>>();
                hyp.char_features = h.at("char_features").get<CharFeatures>();
                try {
                    hyp.validate();
                } catch (const ContractError& e) {
                    throw ParseError(e.what(), no);
                }
                o.hypothesis = std::move(hyp);
            }
            if (j.contains("teacher_score")) o.teacher_score = j.at("teacher_score").get<double>();
            if (j.contains("student_score")) o.student_score = j.at("student_score").get<double>();
            out.push_back(std::move(o));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed observation: ") + e.what(), no);
        }
    });
    return out;
}

std::string format_observations(std::span<const RegionObservation> obs) {
    std::string s;
    for (const auto& o : obs) {
        nlohmann::json j;
        j["frame"] = o.frame;
        const auto xy = o.quad.coords();
        j["quad"] = std::vector<double>(xy.begin(), xy.end());
        j["embedding"] = vec_json(o.embedding);
        if (o.hypothesis) {
            j["hypothesis"] = {{"text", o.hypothesis->text},
                               {"char_probs", o.hypothesis->char_probs},
                               {"char_features", o.hypothesis->char_features}};
        }
        if (o.teacher_score) j["teacher_score"] = *o.teacher_score;
        if (o.student_score) j["student_score"] = *o.student_score;
        s += j.dump();
        s += '\n';
    }
    return s;
}

std::string format_key_values(const std::map<std::string, std::string>& kv) {
    std::string s;
    for (const auto& [k, v] : kv) s += k + '=' + v + '\n';
    return s;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    for_each_line(in, [&](const std::string& line, std::size_t no) {
        const auto pos = line.find('=');
        if (pos == std::string::npos) throw ParseError("expected key=value", no);
        kv[line.substr(0, pos)] = line.substr(pos + 1);
    });
    return kv;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputError(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace vts::io
