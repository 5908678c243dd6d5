#pragma once

#include <filesystem>

#include "vts/tensor.hpp"

namespace vts {

/// Per-frame dense outputs of a detection backbone.
class FrameProvider {
public:
    virtual ~FrameProvider() = default;
    [[nodiscard]] virtual int frame_count() const = 0;
    [[nodiscard]] virtual TensorGrid features(int frame) const = 0;
    /// Single-channel text confidence.
    [[nodiscard]] virtual TensorGrid confidence(int frame) const = 0;
    /// Eight channels per cell: quad vertex offsets (x1,y1..x4,y4) in pixels from the cell centre.
    [[nodiscard]] virtual TensorGrid geometry(int frame) const = 0;
};

/// Source of flow_(source, reference) fields.
class FlowProvider {
public:
    virtual ~FlowProvider() = default;
    [[nodiscard]] virtual FlowField flow(int source, int reference, int height, int width) const = 0;
};

class ZeroFlowProvider final : public FlowProvider {
public:
    [[nodiscard]] FlowField flow(int source, int reference, int height, int width) const override;
};

/// Global pan: the source frame is displaced by (source - reference) * velocity cells.
class UniformFlowProvider final : public FlowProvider {
public:
    UniformFlowProvider(double dx_per_frame, double dy_per_frame) : dx_(dx_per_frame), dy_(dy_per_frame) {}
    [[nodiscard]] FlowField flow(int source, int reference, int height, int width) const override;

private:
    double dx_;
    double dy_;
};

/// Reads `flow_<source>_<reference>.vtf` from a directory; the identity pair is the zero field.
class FileFlowProvider final : public FlowProvider {
public:
    explicit FileFlowProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
    [[nodiscard]] FlowField flow(int source, int reference, int height, int width) const override;
    [[nodiscard]] static std::filesystem::path file_name(int source, int reference);

private:
    std::filesystem::path dir_;
};

/// Reads `features_<t>.vtg`, `conf_<t>.vtg` and `geom_<t>.vtg` (t zero-padded to 5 digits).
/// The frame count is the number of consecutive `conf_` files starting at 0.
class DirectoryFrameProvider final : public FrameProvider {
public:
    explicit DirectoryFrameProvider(std::filesystem::path dir);
    [[nodiscard]] int frame_count() const override { return count_; }
    [[nodiscard]] TensorGrid features(int frame) const override;
    [[nodiscard]] TensorGrid confidence(int frame) const override;
    [[nodiscard]] TensorGrid geometry(int frame) const override;

    [[nodiscard]] static std::string file_name(const char* kind, int frame);

private:
    std::filesystem::path dir_;
    int count_ = 0;
};

}  // namespace vts
