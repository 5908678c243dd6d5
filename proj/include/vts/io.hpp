#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vts/tensor.hpp"
#include "vts/types.hpp"

namespace vts::io {

inline constexpr std::string_view kGridMagic = "VTS-TENSORGRID01";
inline constexpr std::string_view kFlowMagic = "VTS-FLOWFIELD-01";

// Binary grids: 16-byte magic, int32 LE h, w, c, then h*w*c float32 LE row-major.
// Flow fields reuse the layout with c = 2 (dx, dy interleaved).
[[nodiscard]] std::vector<std::uint8_t> encode_tensor_grid(const TensorGrid& g);
[[nodiscard]] TensorGrid decode_tensor_grid(std::span<const std::uint8_t> bytes);
void save_tensor_grid(const std::filesystem::path& path, const TensorGrid& g);
[[nodiscard]] TensorGrid load_tensor_grid(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::uint8_t> encode_flow_field(const FlowField& f);
[[nodiscard]] FlowField decode_flow_field(std::span<const std::uint8_t> bytes);
void save_flow_field(const std::filesystem::path& path, const FlowField& f);
[[nodiscard]] FlowField load_flow_field(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

// Ground truth: frame \t id \t x1 y1 .. x4 y4 (8 tab-separated fields) \t language \t quality \t transcript
[[nodiscard]] std::vector<GroundTruthRecord> parse_annotations(std::istream& in);
[[nodiscard]] std::vector<GroundTruthRecord> load_annotations(const std::filesystem::path& path);
[[nodiscard]] std::string format_annotations(std::span<const GroundTruthRecord> records);

// Detections: frame \t 8 coords \t score
[[nodiscard]] std::vector<Detection> parse_detections(std::istream& in);
[[nodiscard]] std::string format_detections(std::span<const Detection> dets);

// Streams: frame \t id \t 8 coords, one line per observation, sorted by (frame, id)
struct StreamLine {
    int frame = 0;
    int id = 0;
    Quad quad;
};
[[nodiscard]] std::vector<StreamLine> parse_stream_lines(std::istream& in);
[[nodiscard]] std::string format_streams(std::span<const TextStream> streams);
[[nodiscard]] std::vector<TextStream> streams_from_lines(std::span<const StreamLine> lines);

// Decisions: frame \t stream_id \t 8 coords \t quality_score \t text
[[nodiscard]] std::vector<StreamDecision> parse_decisions(std::istream& in);
[[nodiscard]] std::string format_decisions(std::span<const StreamDecision> decisions);

// Observations: one JSON object per line.
[[nodiscard]] std::vector<RegionObservation> parse_observations(std::istream& in);
[[nodiscard]] std::string format_observations(std::span<const RegionObservation> obs);

// key=value lines, keys sorted.
[[nodiscard]] std::string format_key_values(const std::map<std::string, std::string>& kv);
[[nodiscard]] std::map<std::string, std::string> parse_key_values(std::istream& in);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace vts::io
