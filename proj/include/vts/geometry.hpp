#pragma once

#include <array>
#include <span>
#include <vector>

namespace vts {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Four-vertex text region polygon in pixel coordinates.
struct Quad {
    std::array<Point, 4> v{};

    static Quad from_box(double x0, double y0, double x1, double y1);
    static Quad from_coords(std::span<const double, 8> xy);
    [[nodiscard]] std::array<double, 8> coords() const;
    [[nodiscard]] Quad translated(double dx, double dy) const;
    friend bool operator==(const Quad&, const Quad&) = default;
};

struct ScoredQuad {
    Quad quad;
    double score = 0.0;
};

struct Box {
    double x0, y0, x1, y1;
};

/// Convex hull of the vertices in counter-clockwise order (y up) with collinear
/// and duplicate points removed. May return fewer than 4 points for degenerate quads.
[[nodiscard]] std::vector<Point> canonical_polygon(const Quad& q);

[[nodiscard]] double polygon_area(std::span<const Point> poly);
[[nodiscard]] double area(const Quad& q);
[[nodiscard]] Box bounds(const Quad& q);

/// Intersection-over-union of the convex hulls of two quads. Zero if either is degenerate.
[[nodiscard]] double polygon_iou(const Quad& a, const Quad& b);

/// Greedy score-descending suppression. Ties keep earlier input first.
/// Survivors are returned in selection order.
[[nodiscard]] std::vector<ScoredQuad> nms(std::span<const ScoredQuad> candidates, double iou_threshold);

}  // namespace vts
