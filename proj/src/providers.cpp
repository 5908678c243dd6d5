#include "vts/providers.hpp"

#include <cstdio>
#include <stdexcept>

#include "vts/errors.hpp"
#include "vts/io.hpp"

namespace vts {

FlowField ZeroFlowProvider::flow(int, int, int height, int width) const {
    return FlowField::zero(height, width);
}

FlowField UniformFlowProvider::flow(int source, int reference, int height, int width) const {
    const double k = double(source - reference);
    return FlowField::uniform(height, width, float(k * dx_), float(k * dy_));
}

std::filesystem::path FileFlowProvider::file_name(int source, int reference) {
    return "flow_" + std::to_string(source) + "_" + std::to_string(reference) + ".vtf";
}

FlowField FileFlowProvider::flow(int source, int reference, int height, int width) const {
    if (source == reference) return FlowField::zero(height, width);
    const auto path = dir_ / file_name(source, reference);
    if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
    auto f = io::load_flow_field(path);
    if (f.height != height || f.width != width) {
        throw ContractError("flow " + path.string() + " does not match the grid dimensions");
    }
    return f;
}

std::string DirectoryFrameProvider::file_name(const char* kind, int frame) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05d.vtg", kind, frame);
    return buf;
}

DirectoryFrameProvider::DirectoryFrameProvider(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) throw MissingInputError(dir_.string());
    while (std::filesystem::exists(dir_ / file_name("conf", count_))) ++count_;
}

TensorGrid DirectoryFrameProvider::features(int frame) const {
    return io::load_tensor_grid(dir_ / file_name("features", frame));
}

TensorGrid DirectoryFrameProvider::confidence(int frame) const {
    return io::load_tensor_grid(dir_ / file_name("conf", frame));
}

TensorGrid DirectoryFrameProvider::geometry(int frame) const {
    return io::load_tensor_grid(dir_ / file_name("geom", frame));
}

}  // namespace vts
