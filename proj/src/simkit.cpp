#include "vts/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "vts/errors.hpp"
#include "vts/io.hpp"
#include "vts/recognizer.hpp"

namespace vts::simkit {

Quality QualityProfile::level(double u) const noexcept {
    if (u >= high_threshold) return Quality::High;
    if (u >= moderate_threshold) return Quality::Moderate;
    return Quality::Low;
}

double RecognizerErrorSpec::substitution(Quality q) const noexcept {
    switch (q) {
        case Quality::High: return high;
        case Quality::Moderate: return moderate;
        case Quality::Low: return low;
    }
    return low;
}

void ScenarioSpec::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw ContractError(std::string("scenario spec: ") + what);
    };
    require(n_streams >= 1, "n_streams must be at least 1");
    require(frames_min >= 1 && frames_max >= frames_min, "frames_min/frames_max must satisfy 1 <= min <= max");
    require(start_spread >= 0, "start_spread must be non-negative");
    require(identity_separation_deg > 0.0 && identity_separation_deg <= 90.0, "identity_separation_deg must lie in (0, 90]");
    for (double p : {recognizer_error.high, recognizer_error.moderate, recognizer_error.low,
                     recognizer_error.substituted_prob_scale, recognizer_error.systematic_share}) {
        require(p >= 0.0 && p <= 1.0, "recognizer probabilities must lie in [0,1]");
    }
    require(recognizer_error.prob_noise_base >= 0.0 && recognizer_error.prob_noise_gain >= 0.0,
            "prob noise must be non-negative");
    require(profile.flat_value >= 0.0 && profile.flat_value <= 1.0, "profile.flat_value must lie in [0,1]");
    require(profile.peak_min <= profile.peak_max && profile.base_min <= profile.base_max,
            "profile ranges must be ordered");
    require(profile.peak_min >= 0.0 && profile.peak_max <= 1.0 && profile.base_min >= 0.0 && profile.base_max <= 1.0,
            "profile heights must lie in [0,1]");
    require(profile.width_fraction > 0.0, "profile.width_fraction must be positive");
    require(profile.moderate_threshold <= profile.high_threshold, "profile thresholds must be ordered");
    require(embedding_dim >= 2 && char_feature_dim >= 1, "dimensions must be positive");
    require(embedding_noise >= 0.0 && degradation_gain >= 0.0 && char_noise_max >= 0.0 && quad_jitter >= 0.0,
            "noise levels must be non-negative");
    require(word_min >= 1 && word_max >= word_min, "word_min/word_max must satisfy 1 <= min <= max");
    require(cell_stride > 0.0, "cell_stride must be positive");
    require(text_width_min >= 1 && text_width_max >= text_width_min && text_height >= 1, "text size invalid");
    require(lane_height >= text_height, "lane_height must fit the text height");
    require(feature_channels >= 1, "feature_channels must be positive");
}

int Scenario::grid_width() const noexcept {
    return int(std::ceil(double(image_width) / spec.cell_stride));
}

int Scenario::grid_height() const noexcept {
    return int(std::ceil(double(image_height) / spec.cell_stride));
}

namespace {

Vec gaussian(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Vec v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = n01(rng);
    return v;
}

double vdot(const Vec& a, const Vec& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void unit(Vec& v) {
    const double n = std::sqrt(vdot(v, v));
    for (auto& x : v) x /= n;
}

// Direction along which every embedding drifts as quality drops. It belongs to the
// embedding space rather than to a scenario, so it depends only on the dimension.
Vec degradation_direction(int dim) {
    std::mt19937_64 rng(mix_seed(0xDE6EADE, std::uint64_t(dim)));
    Vec v = gaussian(rng, dim);
    unit(v);
    return v;
}

// n unit anchors, pairwise separated by at least `separation_deg` and kept at least that
// far from `fixed` as well. Orthogonal placement when the dimension allows it.
std::vector<Vec> make_anchors(int n, const Vec& fixed, double separation_deg, std::mt19937_64& rng) {
    const int dim = int(fixed.size());
    std::vector<Vec> out;
    if (n + 1 <= dim) {
        std::vector<Vec> basis = {fixed};
        while (int(out.size()) < n) {
            Vec v = gaussian(rng, dim);
            for (const auto& a : basis) {
                const double d = vdot(v, a);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * a[i];
            }
            if (std::sqrt(vdot(v, v)) < 1e-9) continue;
            unit(v);
            basis.push_back(v);
            out.push_back(std::move(v));
        }
        return out;
    }
    if (separation_deg >= 90.0) {
        throw FeasibilityError("cannot place " + std::to_string(n) + " mutually orthogonal anchors in dimension " +
                               std::to_string(dim));
    }
    const double max_cos = std::cos(separation_deg * std::numbers::pi / 180.0);
    int attempts = 0;
    while (int(out.size()) < n) {
        if (++attempts > 200 * (n + 1)) {
            throw FeasibilityError("could not place " + std::to_string(n) + " anchors separated by " +
                                   std::to_string(separation_deg) + " degrees in dimension " + std::to_string(dim));
        }
        Vec v = gaussian(rng, dim);
        unit(v);
        const auto apart = [&](const Vec& a) { return vdot(a, v) <= max_cos; };
        if (apart(fixed) && std::all_of(out.begin(), out.end(), apart)) out.push_back(std::move(v));
    }
    return out;
}

std::string random_word(std::mt19937_64& rng, int lo, int hi) {
    static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::uniform_int_distribution<int> len(lo, hi);
    std::uniform_int_distribution<std::size_t> pick(0, kAlphabet.size() - 1);
    std::string w(std::size_t(len(rng)), ' ');
    for (auto& c : w) c = kAlphabet[pick(rng)];
    return w;
}

double latent_quality(const QualityProfile& p, double offset, double peak_pos, double width, double peak,
                      double base) {
    if (p.kind == QualityProfile::Kind::Flat) return p.flat_value;
    const double z = (offset - peak_pos) / width;
    return std::clamp(base + (peak - base) * std::exp(-z * z), 0.0, 1.0);
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    Scenario sc;
    sc.spec = spec;

    std::mt19937_64 master(mix_seed(spec.seed, 0x5CE7A210));
    const Vec degrade = degradation_direction(spec.embedding_dim);
    const auto anchors = make_anchors(spec.n_streams, degrade, spec.identity_separation_deg, master);

    const double stride = spec.cell_stride;
    const int pan = spec.pan_cells_per_frame;
    const double travel_per_frame = std::abs(pan) * stride;
    const double max_travel = travel_per_frame * double(spec.frames_max - 1);
    const int needed = int(std::ceil(max_travel + double(spec.text_width_max) + 2.0 * stride));
    sc.image_width = std::max(spec.image_width, needed);
    const int margin = int(stride);
    sc.image_height = spec.n_streams * spec.lane_height + 2 * margin;

    struct Row {
        int frame;
        int id;
        GroundTruthRecord gt;
        RegionObservation obs;
        ObservationLabel label;
    };
    std::vector<Row> rows;

    for (int s = 0; s < spec.n_streams; ++s) {
        const int id = s + 1;
        const std::uint64_t stream_seed = mix_seed(spec.seed, std::uint64_t(id));
        std::mt19937_64 rng(stream_seed);
        std::uniform_int_distribution<int> len_d(spec.frames_min, spec.frames_max);
        std::uniform_int_distribution<int> start_d(0, spec.start_spread);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> n01(0.0, 1.0);

        const int len = len_d(rng);
        const int start = start_d(rng);
        const std::string word = random_word(rng, spec.word_min, spec.word_max);
        const int width_cells_lo = int(std::ceil(spec.text_width_min / stride));
        const int width_cells_hi = std::max(width_cells_lo, int(std::floor(spec.text_width_max / stride)));
        const double width = stride * std::uniform_int_distribution<int>(width_cells_lo, width_cells_hi)(rng);
        const double height = stride * std::ceil(spec.text_height / stride);
        const double y0 = margin + double(s * spec.lane_height);

        // Keep the box inside the image for the whole stream.
        const double travel = travel_per_frame * double(len - 1);
        const double x_lo = pan < 0 ? travel : 0.0;
        const double x_hi = double(sc.image_width) - width - (pan > 0 ? travel : 0.0);
        const int cells_lo = int(std::ceil(x_lo / stride));
        const int cells_hi = std::max(cells_lo, int(std::floor(x_hi / stride)));
        const double x_start = stride * std::uniform_int_distribution<int>(cells_lo, cells_hi)(rng);

        const double peak = spec.profile.peak_min + (spec.profile.peak_max - spec.profile.peak_min) * u01(rng);
        const double base = spec.profile.base_min + (spec.profile.base_max - spec.profile.base_min) * u01(rng);
        const double peak_pos = u01(rng) * double(len - 1);
        const double bump_width = std::max(1.0, spec.profile.width_fraction * double(len));

        sc.transcripts[id] = word;
        for (int k = 0; k < len; ++k) {
            const int frame = start + k;
            const double u = latent_quality(spec.profile, double(k), peak_pos, bump_width, peak, base);
            const double deg = 1.0 - u;
            const Quality q = spec.profile.level(u);
            const double x0 = x_start + double(pan) * stride * double(k);

            GroundTruthRecord g;
            g.frame = frame;
            g.id = id;
            g.quad = Quad::from_box(x0, y0, x0 + width, y0 + height);
            g.language = Language::Latin;
            g.quality = q;
            g.transcript = word;

            RegionObservation o;
            o.frame = frame;
            o.quad = g.quad;
            for (auto& p : o.quad.v) {
                p.x += spec.quad_jitter * deg * n01(rng);
                p.y += spec.quad_jitter * deg * n01(rng);
            }
            o.embedding = anchors[std::size_t(s)];
            const double noise_scale = spec.embedding_noise * deg / std::sqrt(double(spec.embedding_dim));
            for (std::size_t d = 0; d < o.embedding.size(); ++d) {
                o.embedding[d] += spec.degradation_gain * deg * degrade[d] + noise_scale * n01(rng);
            }

            ErrorModel em;
            em.substitution_prob = spec.recognizer_error.substitution(q);
            em.feature_noise = spec.char_noise_max * deg;
            em.prob_noise = spec.recognizer_error.prob_noise_base + spec.recognizer_error.prob_noise_gain * deg;
            em.substituted_prob_scale = spec.recognizer_error.substituted_prob_scale;
            em.feature_dim = spec.char_feature_dim;
            if (spec.recognizer_error.systematic) {
                em.systematic_seed = mix_seed(stream_seed, 0x5157);
                em.systematic_share = spec.recognizer_error.systematic_share;
            }
            o.hypothesis = synthetic_recognizer(word, em, mix_seed(stream_seed, std::uint64_t(1000 + k)));

            rows.push_back({frame, id, std::move(g), std::move(o), {id, q, u}});
            sc.n_frames = std::max(sc.n_frames, frame + 1);
        }
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return std::pair(a.frame, a.id) < std::pair(b.frame, b.id); });
    for (auto& r : rows) {
        sc.gt.push_back(std::move(r.gt));
        sc.observations.push_back(std::move(r.obs));
        sc.labels.push_back(r.label);
    }
    return sc;
}

std::map<int, double> high_fractions(const Scenario& scenario) {
    std::map<int, std::pair<int, int>> tally;
    for (const auto& r : scenario.gt) {
        auto& t = tally[r.id];
        ++t.second;
        if (r.quality == Quality::High) ++t.first;
    }
    std::map<int, double> out;
    for (const auto& [id, t] : tally) out[id] = double(t.first) / double(t.second);
    return out;
}

Scenario extreme_filter(const Scenario& scenario, double max_high_fraction) {
    if (!(max_high_fraction > 0.0 && max_high_fraction < 1.0)) {
        throw ContractError("extreme_filter: fraction must lie in (0,1)");
    }
    std::set<int> keep;
    for (const auto& [id, f] : high_fractions(scenario)) {
        if (f <= max_high_fraction) keep.insert(id);
    }
    Scenario out;
    out.spec = scenario.spec;
    out.n_frames = scenario.n_frames;
    out.image_width = scenario.image_width;
    out.image_height = scenario.image_height;
    for (const auto& r : scenario.gt) {
        if (keep.count(r.id)) out.gt.push_back(r);
    }
    for (std::size_t i = 0; i < scenario.observations.size(); ++i) {
        if (keep.count(scenario.labels[i].stream_id)) {
            out.observations.push_back(scenario.observations[i]);
            out.labels.push_back(scenario.labels[i]);
        }
    }
    for (const auto& [id, t] : scenario.transcripts) {
        if (keep.count(id)) out.transcripts[id] = t;
    }
    return out;
}

SyntheticFrameProvider::SyntheticFrameProvider(const Scenario& scenario) : scenario_(&scenario) {
    for (std::size_t i = 0; i < scenario.gt.size(); ++i) gt_by_frame_[scenario.gt[i].frame].push_back(i);
}

template <typename Fn>
void SyntheticFrameProvider::for_each_text_cell(int frame, Fn&& fn) const {
    const auto it = gt_by_frame_.find(frame);
    if (it == gt_by_frame_.end()) return;
    const double stride = scenario_->spec.cell_stride;
    const int gw = scenario_->grid_width();
    const int gh = scenario_->grid_height();
    for (std::size_t idx : it->second) {
        const auto& g = scenario_->gt[idx];
        const Box b = bounds(g.quad);
        const int cx0 = std::max(0, int(std::ceil(b.x0 / stride - 0.5)));
        const int cx1 = std::min(gw - 1, int(std::floor(b.x1 / stride - 0.5)));
        const int cy0 = std::max(0, int(std::ceil(b.y0 / stride - 0.5)));
        const int cy1 = std::min(gh - 1, int(std::floor(b.y1 / stride - 0.5)));
        for (int y = cy0; y <= cy1; ++y)
            for (int x = cx0; x <= cx1; ++x) fn(g, idx, y, x);
    }
}

TensorGrid SyntheticFrameProvider::features(int frame) const {
    TensorGrid g(scenario_->grid_height(), scenario_->grid_width(), scenario_->spec.feature_channels);
    const auto amp = float(scenario_->spec.feature_amplitude);
    for_each_text_cell(frame, [&](const GroundTruthRecord&, std::size_t, int y, int x) {
        for (auto& v : g.cell(y, x)) v = amp;
    });
    return g;
}

TensorGrid SyntheticFrameProvider::confidence(int frame) const {
    TensorGrid g(scenario_->grid_height(), scenario_->grid_width(), 1);
    for_each_text_cell(frame, [&](const GroundTruthRecord&, std::size_t idx, int y, int x) {
        g.at(y, x) = float(0.9 + 0.1 * scenario_->labels[idx].u);
    });
    return g;
}

TensorGrid SyntheticFrameProvider::geometry(int frame) const {
    TensorGrid g(scenario_->grid_height(), scenario_->grid_width(), 8);
    const double stride = scenario_->spec.cell_stride;
    for_each_text_cell(frame, [&](const GroundTruthRecord& r, std::size_t, int y, int x) {
        const double cx = (double(x) + 0.5) * stride;
        const double cy = (double(y) + 0.5) * stride;
        auto cell = g.cell(y, x);
        for (std::size_t k = 0; k < 4; ++k) {
            cell[2 * k] = float(r.quad.v[k].x - cx);
            cell[2 * k + 1] = float(r.quad.v[k].y - cy);
        }
    });
    return g;
}

UniformFlowProvider flow_provider(const Scenario& scenario) {
    return UniformFlowProvider(double(scenario.spec.pan_cells_per_frame), 0.0);
}

double brute_force_assignment(const CostMatrix& cost) {
    if (cost.rows() > 8 || cost.cols() > 8) throw ContractError("brute_force_assignment: at most 8 rows and columns");
    if (cost.rows() == 0 || cost.cols() == 0) return 0.0;
    const bool by_rows = cost.rows() <= cost.cols();
    const std::size_t small = by_rows ? cost.rows() : cost.cols();
    const std::size_t large = by_rows ? cost.cols() : cost.rows();

    std::vector<std::size_t> perm(large);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        // perm[0..small) is the injection; permutations of the tail repeat it harmlessly.
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < small; ++i) pairs.emplace_back(by_rows ? i : perm[i], by_rows ? perm[i] : i);
        std::sort(pairs.begin(), pairs.end());
        double s = 0.0;
        for (const auto& [r, c] : pairs) s += cost(r, c);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---- serialization ----

namespace {

using nlohmann::json;

json profile_json(const QualityProfile& p) {
    return {{"kind", p.kind == QualityProfile::Kind::Flat ? "flat" : "bump"},
            {"flat_value", p.flat_value},
            {"peak_min", p.peak_min},
            {"peak_max", p.peak_max},
            {"base_min", p.base_min},
            {"base_max", p.base_max},
            {"width_fraction", p.width_fraction},
            {"high_threshold", p.high_threshold},
            {"moderate_threshold", p.moderate_threshold}};
}

json error_json(const RecognizerErrorSpec& e) {
    return {{"high", e.high},
            {"moderate", e.moderate},
            {"low", e.low},
            {"prob_noise_base", e.prob_noise_base},
            {"prob_noise_gain", e.prob_noise_gain},
            {"substituted_prob_scale", e.substituted_prob_scale},
            {"systematic", e.systematic},
            {"systematic_share", e.systematic_share}};
}

json spec_json(const ScenarioSpec& s) {
    return {{"n_streams", s.n_streams},
            {"frames_min", s.frames_min},
            {"frames_max", s.frames_max},
            {"start_spread", s.start_spread},
            {"profile", profile_json(s.profile)},
            {"recognizer_error", error_json(s.recognizer_error)},
            {"identity_separation_deg", s.identity_separation_deg},
            {"embedding_dim", s.embedding_dim},
            {"char_feature_dim", s.char_feature_dim},
            {"embedding_noise", s.embedding_noise},
            {"degradation_gain", s.degradation_gain},
            {"char_noise_max", s.char_noise_max},
            {"quad_jitter", s.quad_jitter},
            {"word_min", s.word_min},
            {"word_max", s.word_max},
            {"cell_stride", s.cell_stride},
            {"image_width", s.image_width},
            {"lane_height", s.lane_height},
            {"text_height", s.text_height},
            {"text_width_min", s.text_width_min},
            {"text_width_max", s.text_width_max},
            {"pan_cells_per_frame", s.pan_cells_per_frame},
            {"feature_channels", s.feature_channels},
            {"feature_amplitude", s.feature_amplitude},
            {"seed", s.seed}};
}

// Overwrites fields of `target` from `j`, rejecting keys not present in `defaults`.
void merge_checked(json& target, const json& j, const std::string& where) {
    if (!j.is_object()) throw ContractError("scenario spec: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!target.contains(key)) throw ContractError("scenario spec: unknown key '" + where + key + "'");
        if (target[key].is_object()) {
            merge_checked(target[key], value, where + key + ".");
        } else {
            target[key] = value;
        }
    }
}

}  // namespace

std::string spec_to_json(const ScenarioSpec& spec) {
    return spec_json(spec).dump(2) + "\n";
}

ScenarioSpec spec_from_json(const std::string& text) {
    json merged = spec_json(ScenarioSpec{});
    try {
        merge_checked(merged, json::parse(text), "");
        ScenarioSpec s;
        s.n_streams = merged.at("n_streams").get<int>();
        s.frames_min = merged.at("frames_min").get<int>();
        s.frames_max = merged.at("frames_max").get<int>();
        s.start_spread = merged.at("start_spread").get<int>();
        const auto& p = merged.at("profile");
        const auto kind = p.at("kind").get<std::string>();
        if (kind != "flat" && kind != "bump") throw ContractError("scenario spec: profile.kind must be flat or bump");
        s.profile.kind = kind == "flat" ? QualityProfile::Kind::Flat : QualityProfile::Kind::Bump;
        s.profile.flat_value = p.at("flat_value").get<double>();
        s.profile.peak_min = p.at("peak_min").get<double>();
        s.profile.peak_max = p.at("peak_max").get<double>();
        s.profile.base_min = p.at("base_min").get<double>();
        s.profile.base_max = p.at("base_max").get<double>();
        s.profile.width_fraction = p.at("width_fraction").get<double>();
        s.profile.high_threshold = p.at("high_threshold").get<double>();
        s.profile.moderate_threshold = p.at("moderate_threshold").get<double>();
        const auto& e = merged.at("recognizer_error");
        s.recognizer_error.high = e.at("high").get<double>();
        s.recognizer_error.moderate = e.at("moderate").get<double>();
        s.recognizer_error.low = e.at("low").get<double>();
        s.recognizer_error.prob_noise_base = e.at("prob_noise_base").get<double>();
        s.recognizer_error.prob_noise_gain = e.at("prob_noise_gain").get<double>();
        s.recognizer_error.substituted_prob_scale = e.at("substituted_prob_scale").get<double>();
        s.recognizer_error.systematic = e.at("systematic").get<bool>();
        s.recognizer_error.systematic_share = e.at("systematic_share").get<double>();
        s.identity_separation_deg = merged.at("identity_separation_deg").get<double>();
        s.embedding_dim = merged.at("embedding_dim").get<int>();
        s.char_feature_dim = merged.at("char_feature_dim").get<int>();
        s.embedding_noise = merged.at("embedding_noise").get<double>();
        s.degradation_gain = merged.at("degradation_gain").get<double>();
        s.char_noise_max = merged.at("char_noise_max").get<double>();
        s.quad_jitter = merged.at("quad_jitter").get<double>();
        s.word_min = merged.at("word_min").get<int>();
        s.word_max = merged.at("word_max").get<int>();
        s.cell_stride = merged.at("cell_stride").get<double>();
        s.image_width = merged.at("image_width").get<int>();
        s.lane_height = merged.at("lane_height").get<int>();
        s.text_height = merged.at("text_height").get<int>();
        s.text_width_min = merged.at("text_width_min").get<int>();
        s.text_width_max = merged.at("text_width_max").get<int>();
        s.pan_cells_per_frame = merged.at("pan_cells_per_frame").get<int>();
        s.feature_channels = merged.at("feature_channels").get<int>();
        s.feature_amplitude = merged.at("feature_amplitude").get<double>();
        s.seed = merged.at("seed").get<std::uint64_t>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ContractError(std::string("scenario spec: ") + e.what());
    }
}

void write_scenario(const std::filesystem::path& dir, const Scenario& scenario, int flow_window) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "flows");
    io::write_file_atomic(dir / "gt.tsv", io::format_annotations(scenario.gt));
    io::write_file_atomic(dir / "observations.jsonl", io::format_observations(scenario.observations));

    std::string labels = "# observation\tstream_id\tquality\tu\n";
    for (std::size_t i = 0; i < scenario.labels.size(); ++i) {
        const auto& l = scenario.labels[i];
        labels += std::to_string(i) + '\t' + std::to_string(l.stream_id) + '\t' + to_string(l.quality) + '\t' +
                  io::format_double(l.u) + '\n';
    }
    io::write_file_atomic(dir / "labels.tsv", labels);

    json meta{{"spec", spec_json(scenario.spec)},
              {"n_frames", scenario.n_frames},
              {"image_width", scenario.image_width},
              {"image_height", scenario.image_height},
              {"grid_width", scenario.grid_width()},
              {"grid_height", scenario.grid_height()},
              {"flow_dx_cells_per_frame", scenario.spec.pan_cells_per_frame},
              {"flow_window", flow_window}};
    io::write_file_atomic(dir / "scenario.json", meta.dump(2) + "\n");

    const SyntheticFrameProvider frames(scenario);
    const auto flows = flow_provider(scenario);
    for (int t = 0; t < scenario.n_frames; ++t) {
        io::save_tensor_grid(dir / "frames" / DirectoryFrameProvider::file_name("features", t), frames.features(t));
        io::save_tensor_grid(dir / "frames" / DirectoryFrameProvider::file_name("conf", t), frames.confidence(t));
        io::save_tensor_grid(dir / "frames" / DirectoryFrameProvider::file_name("geom", t), frames.geometry(t));
        for (int i = -flow_window; i <= flow_window; ++i) {
            const int src = t + i;
            if (i == 0 || src < 0 || src >= scenario.n_frames) continue;
            io::save_flow_field(dir / "flows" / FileFlowProvider::file_name(src, t),
                                flows.flow(src, t, scenario.grid_height(), scenario.grid_width()));
        }
    }
}

}  // namespace vts::simkit
