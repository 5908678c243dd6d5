#pragma once

#include <span>
#include <vector>

#include "vts/types.hpp"

namespace vts::objectives {

struct Triplet {
    Vec anchor;
    Vec positive;
    Vec negative;
};

struct LabeledPair {
    Vec a;
    Vec b;
    bool same = false;
};

struct LossWeights {
    double lambda_t = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 1.0;
    double margin = 0.8;
    /// Margin of the contrastive term; negative means "share `margin`".
    double contrastive_margin = -1.0;

    [[nodiscard]] double contra_margin() const noexcept { return contrastive_margin < 0.0 ? margin : contrastive_margin; }
    void validate() const;
};

[[nodiscard]] double euclidean(std::span<const double> a, std::span<const double> b);

/// same: d^2; different: max(0, margin - d)^2.
[[nodiscard]] double contrastive_loss(std::span<const double> a, std::span<const double> b, bool same, double margin);

/// max(0, d(a,p) - d(a,n) + margin).
[[nodiscard]] double triplet_loss(const Triplet& t, double margin);

/// Mean contrastive + lambda_t * mean triplet.
[[nodiscard]] double tracking_loss(std::span<const LabeledPair> pairs, std::span<const Triplet> triplets,
                                   const LossWeights& w);

/// Mean absolute deviation between teacher and student scores.
[[nodiscard]] double scoring_loss(std::span<const double> teacher, std::span<const double> student);

/// lambda1 * l_t + lambda2 * l_s + lambda3 * l_r.
[[nodiscard]] double joint_loss(double l_t, double l_s, double l_r, const LossWeights& w);

// Subgradients, zero on inactive hinge branches.
struct PairGradient {
    Vec da;
    Vec db;
};
[[nodiscard]] PairGradient contrastive_gradient(std::span<const double> a, std::span<const double> b, bool same,
                                                double margin);

struct TripletGradient {
    Vec da;
    Vec dp;
    Vec dn;
};
[[nodiscard]] TripletGradient triplet_gradient(const Triplet& t, double margin);

}  // namespace vts::objectives
