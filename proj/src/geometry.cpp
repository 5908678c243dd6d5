#include "vts/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vts/errors.hpp"

namespace vts {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Sutherland-Hodgman clip of `subject` against the half-plane left of edge (a, b).
std::vector<Point> clip_edge(const std::vector<Point>& subject, const Point& a, const Point& b) {
    std::vector<Point> out;
    out.reserve(subject.size() + 2);
    const std::size_t n = subject.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = subject[i];
        const Point& prev = subject[(i + n - 1) % n];
        const double c_cur = cross(a, b, cur);
        const double c_prev = cross(a, b, prev);
        const bool in_cur = c_cur >= 0.0;
        const bool in_prev = c_prev >= 0.0;
        if (in_cur != in_prev) {
            const double t = c_prev / (c_prev - c_cur);
            out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        if (in_cur) out.push_back(cur);
    }
    return out;
}

bool lex_less(const Quad& a, const Quad& b) {
    const auto ca = a.coords();
    const auto cb = b.coords();
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

}  // namespace

Quad Quad::from_box(double x0, double y0, double x1, double y1) {
    return Quad{{Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}}};
}

Quad Quad::from_coords(std::span<const double, 8> xy) {
    Quad q;
    for (std::size_t i = 0; i < 4; ++i) q.v[i] = {xy[2 * i], xy[2 * i + 1]};
    return q;
}

std::array<double, 8> Quad::coords() const {
    std::array<double, 8> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        out[2 * i] = v[i].x;
        out[2 * i + 1] = v[i].y;
    }
    return out;
}

Quad Quad::translated(double dx, double dy) const {
    Quad q = *this;
    for (auto& p : q.v) {
        p.x += dx;
        p.y += dy;
    }
    return q;
}

std::vector<Point> canonical_polygon(const Quad& q) {
    std::vector<Point> pts(q.v.begin(), q.v.end());
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    // Andrew's monotone chain; strict turns drop collinear points.
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_area(std::span<const Point> poly) {
    if (poly.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(s);
}

double area(const Quad& q) {
    return polygon_area(canonical_polygon(q));
}

Box bounds(const Quad& q) {
    Box b{q.v[0].x, q.v[0].y, q.v[0].x, q.v[0].y};
    for (const auto& p : q.v) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

double polygon_iou(const Quad& a_in, const Quad& b_in) {
    // Fixed argument order makes the result bit-symmetric.
    const bool swap = lex_less(b_in, a_in);
    const Quad& a = swap ? b_in : a_in;
    const Quad& b = swap ? a_in : b_in;

    const auto pa = canonical_polygon(a);
    const auto pb = canonical_polygon(b);
    const double area_a = polygon_area(pa);
    const double area_b = polygon_area(pb);
    if (area_a <= 0.0 || area_b <= 0.0) return 0.0;

    const Box ba = bounds(a);
    const Box bb = bounds(b);
    if (ba.x1 <= bb.x0 || bb.x1 <= ba.x0 || ba.y1 <= bb.y0 || bb.y1 <= ba.y0) return 0.0;

    std::vector<Point> inter = pa;
    for (std::size_t i = 0; i < pb.size() && !inter.empty(); ++i) {
        inter = clip_edge(inter, pb[i], pb[(i + 1) % pb.size()]);
    }
    const double area_i = polygon_area(inter);
    const double uni = area_a + area_b - area_i;
    if (uni <= 0.0) return 0.0;
    return std::clamp(area_i / uni, 0.0, 1.0);
}

std::vector<ScoredQuad> nms(std::span<const ScoredQuad> candidates, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
        throw ContractError("nms: iou_threshold must lie in (0,1)");
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return candidates[i].score > candidates[j].score;
    });

    std::vector<ScoredQuad> kept;
    for (std::size_t idx : order) {
        const auto& c = candidates[idx];
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const ScoredQuad& k) {
            return polygon_iou(k.quad, c.quad) > iou_threshold;
        });
        if (!suppressed) kept.push_back(c);
    }
    return kept;
}

}  // namespace vts
