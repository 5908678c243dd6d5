#include "vts/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "vts/errors.hpp"

namespace vts::objectives {

void LossWeights::validate() const {
    for (double v : {lambda_t, lambda1, lambda2, lambda3}) {
        if (!(v >= 0.0)) throw ContractError("LossWeights: weights must be non-negative");
    }
    if (!(margin > 0.0)) throw ContractError("LossWeights: margin must be positive");
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double contrastive_loss(std::span<const double> a, std::span<const double> b, bool same, double margin) {
    const double d = euclidean(a, b);
    if (same) return d * d;
    const double h = std::max(0.0, margin - d);
    return h * h;
}

double triplet_loss(const Triplet& t, double margin) {
    return std::max(0.0, euclidean(t.anchor, t.positive) - euclidean(t.anchor, t.negative) + margin);
}

double tracking_loss(std::span<const LabeledPair> pairs, std::span<const Triplet> triplets, const LossWeights& w) {
    if (pairs.empty() || triplets.empty()) throw ContractError("tracking_loss: empty batch");
    w.validate();
    double contra = 0.0;
    for (const auto& p : pairs) contra += contrastive_loss(p.a, p.b, p.same, w.contra_margin());
    double trip = 0.0;
    for (const auto& t : triplets) trip += triplet_loss(t, w.margin);
    return contra / double(pairs.size()) + w.lambda_t * trip / double(triplets.size());
}

double scoring_loss(std::span<const double> teacher, std::span<const double> student) {
    if (teacher.size() != student.size()) throw ContractError("scoring_loss: length mismatch");
    if (teacher.empty()) throw ContractError("scoring_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < teacher.size(); ++i) s += std::abs(teacher[i] - student[i]);
    return s / double(teacher.size());
}

double joint_loss(double l_t, double l_s, double l_r, const LossWeights& w) {
    return w.lambda1 * l_t + w.lambda2 * l_s + w.lambda3 * l_r;
}

namespace {

// d/da ||a - b|| = (a - b) / ||a - b||; zero at coincidence.
Vec unit_diff(std::span<const double> a, std::span<const double> b, double d) {
    Vec g(a.size(), 0.0);
    if (d <= 0.0) return g;
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = (a[i] - b[i]) / d;
    return g;
}

Vec scaled(const Vec& v, double k) {
    Vec out(v);
    for (auto& x : out) x *= k;
    return out;
}

}  // namespace

PairGradient contrastive_gradient(std::span<const double> a, std::span<const double> b, bool same, double margin) {
    PairGradient g{Vec(a.size(), 0.0), Vec(b.size(), 0.0)};
    if (same) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            g.da[i] = 2.0 * (a[i] - b[i]);
            g.db[i] = -g.da[i];
        }
        return g;
    }
    const double d = euclidean(a, b);
    if (d >= margin) return g;
    const Vec u = unit_diff(a, b, d);
    g.da = scaled(u, -2.0 * (margin - d));
    g.db = scaled(u, 2.0 * (margin - d));
    return g;
}

TripletGradient triplet_gradient(const Triplet& t, double margin) {
    const std::size_t n = t.anchor.size();
    TripletGradient g{Vec(n, 0.0), Vec(n, 0.0), Vec(n, 0.0)};
    const double dp = euclidean(t.anchor, t.positive);
    const double dn = euclidean(t.anchor, t.negative);
    if (dp - dn + margin <= 0.0) return g;
    const Vec up = unit_diff(t.anchor, t.positive, dp);
    const Vec un = unit_diff(t.anchor, t.negative, dn);
    for (std::size_t i = 0; i < n; ++i) {
        g.da[i] = up[i] - un[i];
        g.dp[i] = -up[i];
        g.dn[i] = un[i];
    }
    return g;
}

}  // namespace vts::objectives
